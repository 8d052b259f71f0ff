#pragma once

// JSON encodings shared by the cache and the report writer.

#include <json.hpp>

#include "clonewright/anti_unify.hpp"
#include "clonewright/project.hpp"

namespace clonewright::serial {

using nlohmann::json;

json span_to_json(const Span &s);
Span span_from_json(const json &j, FileId file);

json expr_to_json(const Expr &e);
Expr expr_from_json(const json &j, FileId file);

json parsed_to_json(const ParsedFile &f);
std::shared_ptr<const ParsedFile> parsed_from_json(const json &j, FileId file);

json au_to_json(const AuResult &r);
AuResult au_from_json(const json &j);

void restamp(std::vector<Token> &tokens, ModuleAst &ast, FileId file);

} // namespace clonewright::serial
