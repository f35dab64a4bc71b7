#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "hodecomp/types.hpp"

namespace hodecomp {

struct Name {
  std::string base;
  int index = 0; // 0 means unindexed
  bool dual = false;
  bool shared = false;

  Name co() const;
  Name with_index(int i) const;
  Name plain() const;
  bool propagator() const;
  bool rec_propagator() const;
  bool reserved() const;

  friend bool operator==(const Name& a, const Name& b) {
    return a.base == b.base && a.index == b.index && a.dual == b.dual;
  }
  friend bool operator!=(const Name& a, const Name& b) { return !(a == b); }
  friend bool operator<(const Name& a, const Name& b) {
    if (a.base != b.base) return a.base < b.base;
    if (a.index != b.index) return a.index < b.index;
    return a.dual < b.dual;
  }
};

// Propagator c_k and its dual.
Name prop(int k, bool dual = false);
// Shared propagator c^r for the recursive name r.
Name rec_prop(const Name& r);

struct Lit {
  std::variant<std::int64_t, bool> v;
  friend bool operator==(const Lit& a, const Lit& b) { return a.v == b.v; }
};

struct Process;
struct Value;
using ProcP = std::shared_ptr<const Process>;
using ValP = std::shared_ptr<const Value>;

enum class Lin { lin, sh };

struct Binder {
  Name name;
  TypeP type; // may be null in unannotated terms
};

struct VarV {
  std::string id;
};
struct AbsV {
  std::vector<Binder> params;
  Lin lin = Lin::lin;
  ProcP body;
};
// First-order name payload; only valid in name-passing source terms.
struct NameV {
  Name name;
};

struct Value {
  std::variant<VarV, AbsV, Lit, NameV> v;
};

using Arg = std::variant<Name, Lit>;

struct Output {
  Name subj;
  std::vector<ValP> payload;
  ProcP cont;
};
struct Input {
  Name subj;
  std::vector<std::string> binders;
  ProcP cont;
};
struct Select {
  Name subj;
  std::string label;
  ProcP cont;
};
struct Branch {
  Name subj;
  std::vector<std::pair<std::string, ProcP>> cases;
};
struct App {
  ValP fun;
  std::vector<Arg> args;
};
struct Par {
  ProcP left, right;
};
struct Res {
  Name name; // plain endpoint
  TypeP type; // type of the plain endpoint, may be null
  ProcP body;
};
struct Inact {};

struct Process {
  std::variant<Output, Input, Select, Branch, App, Par, Res, Inact> v;
};

namespace mk {
ProcP nil();
ProcP out(Name s, std::vector<ValP> payload, ProcP cont);
ProcP in(Name s, std::vector<std::string> binders, ProcP cont);
ProcP sel(Name s, std::string label, ProcP cont);
ProcP bra(Name s, std::vector<std::pair<std::string, ProcP>> cases);
ProcP app(ValP fun, std::vector<Arg> args);
ProcP par(ProcP l, ProcP r);
ProcP par(const std::vector<ProcP>& ps);
ProcP res(Name n, TypeP t, ProcP body);
ProcP res(const std::vector<std::pair<Name, TypeP>>& ns, ProcP body);
ValP var(std::string id);
ValP abs(std::vector<Binder> params, Lin lin, ProcP body);
ValP lit(std::int64_t i);
ValP lit(bool b);
ValP name(Name n);
} // namespace mk

template <class T> const T* as(const ProcP& p) { return std::get_if<T>(&p->v); }
template <class T> const T* as(const ValP& v) { return std::get_if<T>(&v->v); }

// Free value variables in first-occurrence preorder.
std::vector<std::string> free_vars(const ProcP& p);
std::vector<std::string> free_vars(const ValP& v);
// Free names in first-occurrence preorder.
std::vector<Name> free_names(const ProcP& p);
std::vector<Name> free_names(const ValP& v);

std::vector<Name> init_names(const std::vector<Name>& us);

struct Subst {
  std::map<Name, Arg> names;
  std::map<std::string, ValP> vars;
  bool empty() const { return names.empty() && vars.empty(); }
};

ProcP substitute(const ProcP& p, const Subst& s);
ValP substitute(const ValP& v, const Subst& s);

// Renames every binder to a fresh one from a global supply.
ProcP refresh_binders(const ProcP& p);
ValP refresh_binders(const ValP& v);

// Binders renamed by binding order; a restricted session pair is flipped so
// that its first occurrence is plain.
ProcP canonical_rename(const ProcP& p);
// Structural serialization ignoring type annotations.
std::string structural_key(const ProcP& p);
std::string structural_key(const ValP& v);

bool alpha_eq(const ProcP& p, const ProcP& q);
bool alpha_eq(const ValP& v, const ValP& w);

using NameTypes = std::map<Name, TypeP>;

// Types of the name-passing translation: first-order payloads C become
// lin(?<lin(C)>;end).
TypeP encode_type(const TypeP& t);
// Free names are typed by env (name-passing types); restrictions by their
// annotations. Unknown types leave binders unannotated.
ProcP encode_namepass(const ProcP& p, const NameTypes& env = {});

std::string fresh_suffix();

} // namespace hodecomp
