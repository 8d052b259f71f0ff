#include "clonewright/printer.hpp"

namespace clonewright {

namespace {

constexpr int kPrimary = 1000;

int precedence(const Expr &e) {
  if (e.kind == ExprKind::Match)
    return 100;
  if (e.kind != ExprKind::BinOp)
    return kPrimary;
  if (e.text == "!")
    return 100;
  if (e.text == "++")
    return 300;
  if (e.text == "+" || e.text == "-")
    return 400;
  return 500;
}

bool right_assoc(const Expr &e) {
  return e.kind == ExprKind::Match || e.text == "!" || e.text == "++";
}

std::string pad(int indent) { return std::string(indent, ' '); }

std::string print_at(const Expr &e, int indent, int min_prec);

std::string print_list(const Expr &e, int indent) {
  std::string out = "[";
  const Expr *cur = &e;
  bool first = true;
  while (cur->kind == ExprKind::Cons) {
    if (!first)
      out += ", ";
    first = false;
    out += print_at(cur->children[0], indent, 0);
    cur = &cur->children[1];
  }
  if (cur->kind != ExprKind::Nil)
    out += " | " + print_at(*cur, indent, 0);
  return out + "]";
}

std::string print_clause_body(std::span<const Expr> body, int indent) {
  return print_sequence(body, indent);
}

std::string print_at(const Expr &e, int indent, int min_prec) {
  std::string out;
  switch (e.kind) {
  case ExprKind::Integer:
  case ExprKind::String:
  case ExprKind::Atom:
  case ExprKind::Variable:
    out = e.text;
    break;
  case ExprKind::Nil:
    out = "[]";
    break;
  case ExprKind::Cons:
    out = print_list(e, indent);
    break;
  case ExprKind::Tuple:
    out = "{" + print_args(e.children, indent) + "}";
    break;
  case ExprKind::BinOp:
  case ExprKind::Match: {
    int p = precedence(e);
    bool ra = right_assoc(e);
    std::string lhs = print_at(e.children[0], indent, ra ? p + 1 : p);
    std::string rhs = print_at(e.children[1], indent, ra ? p : p + 1);
    std::string op = e.kind == ExprKind::Match ? "=" : e.text;
    out = lhs + " " + op + " " + rhs;
    break;
  }
  case ExprKind::LocalCall:
    out = e.text + "(" + print_args(e.children, indent) + ")";
    break;
  case ExprKind::RemoteCall:
    out = e.module + ":" + e.text + "(" + print_args(e.children, indent) + ")";
    break;
  case ExprKind::VarCall:
    out = e.children[0].text + "(" + print_args(e.args(), indent) + ")";
    break;
  case ExprKind::Fun: {
    const Expr &cl = e.children[0];
    std::string head = "fun(" + print_args(cl.patterns(), indent) + ") ->";
    auto body = cl.body();
    if (body.size() == 1) {
      std::string single = print_at(body[0], indent, 0);
      if (single.find('\n') == std::string::npos) {
        out = head + " " + single + " end";
        break;
      }
    }
    out = head + "\n" + print_clause_body(body, indent + 2) + "\n" +
          pad(indent) + "end";
    break;
  }
  case ExprKind::Case: {
    out = "case " + print_at(e.children[0], indent, 0) + " of\n";
    for (std::size_t i = 1; i < e.children.size(); ++i) {
      const Expr &cl = e.children[i];
      out += pad(indent + 2) + print_at(cl.children[0], indent + 2, 0) +
             " ->\n" + print_clause_body(cl.body(), indent + 4);
      out += i + 1 < e.children.size() ? ";\n" : "\n";
    }
    out += pad(indent) + "end";
    break;
  }
  case ExprKind::Clause:
    out = "(" + print_args(e.patterns(), indent) + ") ->\n" +
          print_clause_body(e.body(), indent + 2);
    break;
  }
  if (precedence(e) < min_prec)
    return "(" + out + ")";
  return out;
}

} // namespace

std::string print_args(std::span<const Expr> args, int indent) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i)
      out += ", ";
    out += print_at(args[i], indent, 0);
  }
  return out;
}

std::string print_sequence(std::span<const Expr> body, int indent) {
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i)
      out += ",\n";
    out += pad(indent) + print_at(body[i], indent, 0);
  }
  return out;
}

std::string print(const Expr &e, int indent) { return print_at(e, indent, 0); }

std::string print(const FunDef &f) {
  std::string out;
  for (std::size_t i = 0; i < f.clauses.size(); ++i) {
    const Expr &cl = f.clauses[i];
    out += f.name + "(" + print_args(cl.patterns(), 0) + ") ->\n" +
           print_sequence(cl.body(), 2);
    out += i + 1 < f.clauses.size() ? ";\n" : ".";
  }
  return out;
}

std::string print(const ModuleAst &m) {
  std::string out = "-module(" + m.name + ").\n";
  for (const auto &f : m.functions)
    out += "\n" + print(f) + "\n";
  return out;
}

} // namespace clonewright
