#!/usr/bin/env python3
"""Regenerates replica.json. The per-RP flag layout is the only source of truth."""
import json
import pathlib

HYBRID = [
    # name, flags, note
    ("h01", "AUTH_BY_GOOGLE_ID CLIENT_SUBMITS_VIA_POST NO_STATE", "google_id only"),
    ("h02", "AUTH_BY_GOOGLE_ID NO_STATE", "google_id only, GET"),
    ("h03", "GOOGLE_ID_WITH_ACCESS_TOKEN SUBMITS_ACCESS_TOKEN CLIENT_SUBMITS_VIA_POST NO_STATE", "google_id with access_token"),
    ("h04", "GOOGLE_ID_WITH_CODE CLIENT_SUBMITS_VIA_POST NO_STATE", "google_id with code"),
    ("h05", "GOOGLE_ID_WITH_CODE PLAINTEXT_SIGNIN_ENDPOINT FIXED_STATE", "google_id with code over http"),
    ("h06", "GOOGLE_ID_WITH_CODE CLIENT_SUBMITS_VIA_POST", "google_id with code, bound state"),
    ("h07", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN PLAINTEXT_SIGNIN_ENDPOINT CLIENT_SUBMITS_VIA_POST NO_STATE", "token over http"),
    ("h08", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN PLAINTEXT_SIGNIN_ENDPOINT CLIENT_SUBMITS_VIA_POST NO_STATE", "token over http"),
    ("h09", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN PLAINTEXT_SIGNIN_ENDPOINT CLIENT_SUBMITS_VIA_POST NO_STATE", "token over http"),
    ("h10", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN REQUIRES_EMAIL_WITH_TOKEN CLIENT_SUBMITS_VIA_POST NO_STATE", "token plus email"),
    ("h11", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN REQUIRES_EMAIL_WITH_TOKEN CLIENT_SUBMITS_VIA_POST NO_STATE", "token plus email"),
    ("h12", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN REQUIRES_EMAIL_WITH_TOKEN CLIENT_SUBMITS_VIA_POST NO_STATE", "token plus email"),
    ("h13", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN CLIENT_SUBMITS_VIA_POST FIXED_STATE", "token, constant state"),
    ("h14", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN CLIENT_SUBMITS_VIA_POST NULL_STATE_FORWARDED", "token, forwards API state"),
    ("h15", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN NO_STATE", "token, GET"),
    ("h16", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN NO_STATE", "token, GET"),
    ("h17", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN CLIENT_SUBMITS_VIA_POST", "token, bound state"),
    ("h18", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN", "token, bound state"),
    ("h19", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN CLIENT_SUBMITS_VIA_POST", "token, bound state"),
    ("h20", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN VERIFIES_ACCESS_TOKEN CLIENT_SUBMITS_VIA_POST NO_STATE", "verified token"),
    ("h21", "SUBMITS_ACCESS_TOKEN AUTH_BY_ACCESS_TOKEN VERIFIES_ACCESS_TOKEN CLIENT_SUBMITS_VIA_POST", "verified token, bound state"),
    ("h22", "SUBMITS_ACCESS_TOKEN SUBMITS_ID_TOKEN PLAINTEXT_SIGNIN_ENDPOINT CLIENT_SUBMITS_VIA_POST NO_STATE", "tokens over http, id_token authenticates"),
    ("h23", "SUBMITS_ACCESS_TOKEN SUBMITS_ID_TOKEN CLIENT_SUBMITS_VIA_POST NO_STATE", "id_token authenticates"),
    ("h24", "SUBMITS_ACCESS_TOKEN SUBMITS_ID_TOKEN CLIENT_SUBMITS_VIA_POST", "id_token authenticates, bound state"),
    ("h25", "PLAINTEXT_SIGNIN_ENDPOINT RETURNS_USERINFO_PLAINTEXT CLIENT_SUBMITS_VIA_POST NO_STATE", "http sign-in, profile in page"),
    ("h26", "DOWNGRADE_TO_HTTP_AFTER_SIGNIN TOKEN_IN_PLAINTEXT_COOKIE CLIENT_SUBMITS_VIA_POST NO_STATE", "https sign-in, http landing, token cookie"),
    ("h27", "CLIENT_SUBMITS_VIA_POST FIXED_STATE", "code, constant state"),
    ("h28", "CLIENT_SUBMITS_VIA_POST NULL_STATE_FORWARDED", "code, forwards API state"),
    ("h29", "NULL_STATE_FORWARDED", "code, forwards API state, GET"),
    ("h30", "NO_STATE", "code, GET"),
    ("h31", "CLIENT_SUBMITS_VIA_POST", "code, bound state"),
    ("h32", "", "code, bound state, GET"),
    ("h33", "CLIENT_SUBMITS_VIA_POST", "hardened reference"),
]


def code_flow():
    rps = []
    for i in range(1, 70):
        flags, notes = [], []
        if i <= 4:
            flags.append("RETURNS_ACCESS_TOKEN_TO_BROWSER")
            notes.append("token echoed to browser")
        elif i <= 11:
            flags.append("RETURNS_USERINFO_PLAINTEXT")
            notes.append("profile over http")
        if 10 <= i <= 33:
            if i == 10:
                flags.append("NULL_STATE_FORWARDED")
                notes.append("null state")
            elif i <= 15:
                flags.append("FIXED_STATE")
                notes.append("constant state")
            else:
                flags.append("NO_STATE")
                notes.append("no state")
        rps.append({"name": f"c{i:02d}", "flow": "AuthorizationCode", "flags": flags,
                    "note": ", ".join(notes) or "bound state"})
    return rps


def main():
    rps = code_flow()
    rps += [{"name": n, "flow": "Hybrid", "flags": f.split(), "note": note} for n, f, note in HYBRID]
    rps.append({"name": "s01", "flow": "ClientSide", "flags": [], "note": "hardened (assumed)"})
    manifest = {
        "description": "Replica fleet: 69 code-flow, 33 hybrid and 1 client-side RP.",
        "seed": 20150417,
        "op": {"null_state_bug": True, "accept_mutated_response_type": True},
        "browser": {"universal_xss": True},
        "assumptions": [
            "The client-side RP's flaws are not broken out in the source counts; it is given the hardened profile.",
            "The cookie-borne token RP and the https-then-http profile RP are the same RP (h26).",
        ],
        "rps": rps,
    }
    out = pathlib.Path(__file__).with_name("replica.json")
    out.write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
