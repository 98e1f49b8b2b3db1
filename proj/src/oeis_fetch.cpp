#include "mqm/error.hpp"
#include "mqm/fixedpoint.hpp"

#ifdef MQM_HAVE_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#endif

namespace mqm {

std::string fetch_bfile(const std::string& sequence_id, const std::string& host, int port) {
  if (sequence_id.size() < 2 || sequence_id[0] != 'A') {
    throw DomainError("sequence id must look like A058914, got '" + sequence_id + "'");
  }
#ifdef MQM_HAVE_TLS
  const std::string target = "/" + sequence_id + "/b" + sequence_id.substr(1) + ".txt";
  httplib::SSLClient client(host, port);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(30, 0);
  client.set_follow_location(true);
  auto res = client.Get(target);
  if (!res) {
    throw ResourceError("fetching https://" + host + target + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ResourceError("fetching https://" + host + target + " returned HTTP " + std::to_string(res->status));
  }
  return res->body;
#else
  (void)host;
  (void)port;
  throw ResourceError("this build has no TLS support; use the bundled reference data");
#endif
}

}  // namespace mqm
