#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hodecomp {

struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Session types: End Out In Sel Bra Rec Var.
// Value types: Lin Sh Int Bool. Channel types: Chan.
enum class TKind { End, Out, In, Sel, Bra, Rec, Var, Chan, Lin, Sh, Int, Bool };

struct Type;
using TypeP = std::shared_ptr<const Type>;
using TypeList = std::vector<TypeP>;
using Labels = std::vector<std::pair<std::string, TypeP>>;

struct Type {
  TKind kind = TKind::End;
  TypeList items;  // Out/In payload, Lin/Sh parameters, Chan payload
  TypeP next;      // Out/In continuation, Rec body
  Labels labels;   // Sel/Bra, insertion ordered
  std::string var; // Rec binder, Var name
};

TypeP t_end();
TypeP t_out(TypeList payload, TypeP cont);
TypeP t_in(TypeList payload, TypeP cont);
TypeP t_sel(Labels labels);
TypeP t_bra(Labels labels);
TypeP t_rec(std::string var, TypeP body);
TypeP t_var(std::string var);
TypeP t_chan(TypeP payload);
TypeP t_lin(TypeList params);
TypeP t_sh(TypeList params);
TypeP t_int();
TypeP t_bool();

bool is_session(const TypeP& t);
bool is_arrow(const TypeP& t);
bool is_base(const TypeP& t);

std::string show(const TypeP& t);
std::string show(const TypeList& ts);

std::set<std::string> free_tvars(const TypeP& t);
TypeP subst_tvar(const TypeP& t, const std::string& var, const TypeP& repl);
// One unfolding of a top-level μ; identity otherwise.
TypeP unfold(const TypeP& t);
// Unfold until the head is not a μ.
TypeP unfold_head(const TypeP& t);
bool contractive(const TypeP& t);

// Equi-recursive equality.
bool type_equal(const TypeP& a, const TypeP& b);
bool type_equal(const TypeList& a, const TypeList& b);

TypeP dual(const TypeP& s);

bool is_minimal(const TypeP& t);

bool is_tail_recursive(const TypeP& s);
// True when s is μt.B tail-recursive or a suffix unfolding of one.
bool is_rec_unfolding(const TypeP& s);

TypeList gdecomp(const TypeP& t);
TypeP gdecomp_value(const TypeP& u);
TypeList rdecomp(const TypeP& body);
TypeList rsdecomp(const TypeP& s);
int findex(const TypeP& s);

// Number of names a name of type C decomposes into.
std::size_t decomp_len(const TypeP& c);

// Typing environment entries keyed by printed name.
struct EnvEntry {
  std::string name;
  std::string base;
  int index = 0;
  bool dual = false;
  TypeP type;
};
using SessionEnv = std::vector<EnvEntry>;

SessionEnv envdecomp(const SessionEnv& env);
bool balanced(const SessionEnv& env);
std::vector<SessionEnv> env_step(const SessionEnv& env);

} // namespace hodecomp
