#include "http.hpp"

#include <httplib.h>

#include "session.hpp"

namespace clonewright::tools {

namespace {

void send(httplib::Response &res, const Response &r) {
  res.status = r.status;
  res.set_content(r.body, "application/json");
}

} // namespace

void mount(httplib::Server &server, Session &session) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/.*)", [](const httplib::Request &, httplib::Response &res) {
    res.status = 204;
  });
  server.Get("/report", [&](const httplib::Request &req, httplib::Response &res) {
    send(res, session.report(req.has_param("order") ? req.get_param_value("order")
                                                    : std::string()));
  });
  server.Get("/source", [&](const httplib::Request &req, httplib::Response &res) {
    send(res, session.source(req.get_param_value("file")));
  });
  server.Get(R"(/clone/(\d+))",
             [&](const httplib::Request &req, httplib::Response &res) {
               send(res, session.clone(std::stoul(req.matches[1].str())));
             });
  server.Post("/preview", [&](const httplib::Request &req, httplib::Response &res) {
    send(res, session.preview(req.body));
  });
  server.Post("/apply", [&](const httplib::Request &req, httplib::Response &res) {
    send(res, session.apply(req.body));
  });
  server.Post("/undo", [&](const httplib::Request &req, httplib::Response &res) {
    send(res, session.undo(req.body));
  });
  server.Post("/thresholds",
              [&](const httplib::Request &req, httplib::Response &res) {
                send(res, session.thresholds(req.body));
              });
}

bool serve(Session &session, const std::string &host, int port) {
  httplib::Server server;
  mount(server, session);
  return server.listen(host, port);
}

} // namespace clonewright::tools
