#include "oidcsim/http.hpp"

namespace oidcsim {

std::string_view to_string(ChannelSecurity channel) {
  return channel == ChannelSecurity::Http ? "http" : "https";
}

HttpResponse Network::dispatch(const HttpRequest& request) const {
  HttpActor* actor = find(request.url.host);
  if (actor == nullptr) {
    HttpResponse r = HttpResponse::error(502, "FailedConnection", request.url.host);
    return r;
  }
  return actor->handle(request);
}

}  // namespace oidcsim
