#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "clonewright/detector.hpp"
#include "clonewright/project.hpp"

namespace clonewright {

/// Domain-level refactoring failure (precondition, unknown target, ...).
class RefactorError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ReadOnlyError : public RefactorError {
public:
  explicit ReadOnlyError(std::string path)
      : RefactorError("file is not writable: " + path), path_(std::move(path)) {}
  const std::string &path() const { return path_; }

private:
  std::string path_;
};

/// Coarse side-effect table. Unknown remote calls are effectful; local
/// functions are pure when their bodies are.
class EffectTable {
public:
  static EffectTable standard();

  void set(const std::string &module, const std::string &name,
           std::size_t arity, bool pure);
  std::optional<bool> lookup(const CallTarget &t) const;

  bool is_pure(const Expr &e, const Project *project,
               const ModuleAst *module) const;

private:
  bool pure_call(const CallTarget &t, const Project *project,
                 std::vector<CallTarget> &visiting) const;
  bool pure_expr(const Expr &e, const Project *project,
                 const ModuleAst *module,
                 std::vector<CallTarget> &visiting) const;

  std::map<std::tuple<std::string, std::string, std::size_t>, bool> table_;
};

/// Function reference `module:name/arity`; an empty module matches the
/// unique definition in the project.
struct FunRef {
  std::string module;
  std::string name;
  std::size_t arity = 0;

  static FunRef parse(std::string_view text);
  std::string str() const;
};

struct ResolvedFun {
  FileId file = 0;
  std::uint32_t function = 0;
};
ResolvedFun resolve_fun(const Project &p, const FunRef &ref);

struct Generalisation {
  FunDef def;
  std::vector<bool> closure; // per parameter
  std::vector<std::string> exports;
  /// Call argument list per class instance.
  std::vector<std::vector<Expr>> calls;
};

/// Function definition encapsulating a clone class. Parameters whose
/// actual value is effectful in any instance become zero-arity closures.
Generalisation generalise(const Project &p, const CloneClass &c,
                          const EffectTable &effects = EffectTable::standard(),
                          const std::string &name = "new_fun");

struct InstanceOutcome {
  SiteRef site;
  std::string location;
  bool applied = false;
  std::string reason;
};

struct FileChange {
  std::string path;
  std::string before;
  std::string after;
};

struct RefactorResult {
  std::vector<FileChange> changes;
  std::vector<InstanceOutcome> outcomes;

  bool changed() const { return !changes.empty(); }
  /// The sources of `p` with the changes applied.
  std::vector<SourceFile> sources(const Project &p) const;
};

/// Parameter renames and a new parameter order (by new names), applied to a
/// generalisation before it is pasted.
struct ParamEdit {
  std::map<std::string, std::string> rename;
  std::vector<std::string> order;
};
FunDef edit_params(const FunDef &def, const ParamEdit &edit);

/// `second` was computed on the sources produced by `first`.
RefactorResult compose(const Project &p, const RefactorResult &first,
                       const RefactorResult &second);

struct EliminateOptions {
  std::string name = "new_fun";
  std::string module; // defaults to the module of the first instance
  ParamEdit params;
  std::vector<std::size_t> instances; // indices into the class; empty = all
};

/// Pastes the class's generalisation and folds the chosen instances.
RefactorResult eliminate(const Project &p, const CloneClass &c,
                         const EliminateOptions &opts,
                         const EffectTable &effects = EffectTable::standard());

/// Appends a function definition to a module.
RefactorResult add_function(const Project &p, const std::string &module,
                            const FunDef &def);

/// Sites anywhere in the project that are instances of the body of `target`.
std::vector<SiteRef> fold_instances(const Project &p, const FunRef &target);

/// Replaces the selected instances by calls to `target`. Instances failing a
/// precondition are skipped and reported in `outcomes`.
RefactorResult fold(const Project &p, const FunRef &target,
                    const std::vector<SiteRef> &selection);

RefactorResult rename_function(const Project &p, const FunRef &target,
                               const std::string &new_name);

RefactorResult rename_variable(const Project &p, const std::string &file,
                               Pos at, const std::string &new_name);

/// Positions are 1-based.
RefactorResult swap_arguments(const Project &p, const FunRef &target,
                              std::size_t i, std::size_t j);

/// Inlines the call at `at`, a top-level body expression or the right side
/// of a top-level match.
RefactorResult inline_call(const Project &p, const std::string &file, Pos at);

RefactorResult extract_function(const Project &p, const SiteRef &selection,
                                const std::string &name);

struct VariableInstance {
  Span span;
  bool defining = false;
};

/// The defining occurrence and all uses of the variable at `at`.
std::vector<VariableInstance>
variable_instances(const Project &p, const std::string &file, Pos at);

/// Throws ReadOnlyError before writing anything when a target file cannot
/// be written.
void check_writable(const RefactorResult &r);

/// Writes every change atomically (temporary file + rename).
void write_changes(const RefactorResult &r);

} // namespace clonewright
