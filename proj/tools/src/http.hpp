#pragma once

#include <string>

namespace httplib {
class Server;
}

namespace clonewright::tools {

class Session;

/// Registers the JSON endpoints on `server`.
void mount(httplib::Server &server, Session &session);

/// Blocks until the server stops. Returns false when the port cannot be bound.
bool serve(Session &session, const std::string &host, int port);

} // namespace clonewright::tools
