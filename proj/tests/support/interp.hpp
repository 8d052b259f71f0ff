#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "clonewright/project.hpp"

namespace clonewright::testing {

class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Value;
using ValuePtr = std::shared_ptr<const Value>;
using Env = std::map<std::string, ValuePtr>;

struct Closure {
  const Expr *clause = nullptr;
  Env env;
  std::string module;
};

struct Value {
  enum class Kind { Int, Atom, Str, Tuple, Nil, Cons, Fun } kind = Kind::Nil;
  long long i = 0;
  std::string s;
  std::vector<ValuePtr> elems; // tuple elements, or [head, tail]
  Closure fun;
};

std::string show(const Value &v);

/// Small evaluator for the Mel subset used by the test corpora. Side effects
/// (output, sends, calls to unknown modules) are appended to `log`, so two
/// programs agree when both the result and the log agree.
class Interpreter {
public:
  explicit Interpreter(const Project &p, std::size_t fuel = 200000)
      : project_(p), fuel_(fuel) {}

  ValuePtr call(const std::string &module, const std::string &name,
                const std::vector<ValuePtr> &args);

  /// `show` of the result followed by the effect log, or the error text.
  std::string run(const std::string &module, const std::string &name,
                  const std::vector<ValuePtr> &args = {});

  const std::vector<std::string> &log() const { return log_; }

private:
  ValuePtr eval(const Expr &e, Env &env, const std::string &module);
  ValuePtr eval_body(std::span<const Expr> body, Env &env,
                     const std::string &module);
  ValuePtr apply_fun(const Value &f, const std::vector<ValuePtr> &args);
  ValuePtr builtin(const std::string &module, const std::string &name,
                   const std::vector<ValuePtr> &args);
  bool match(const Expr &pat, const ValuePtr &v, Env &env, bool fresh);
  void tick();

  const Project &project_;
  std::size_t fuel_;
  std::vector<std::string> log_;
};

ValuePtr int_value(long long v);
ValuePtr atom_value(std::string a);
ValuePtr tuple_value(std::vector<ValuePtr> elems);
ValuePtr list_value(const std::vector<ValuePtr> &elems);

} // namespace clonewright::testing
