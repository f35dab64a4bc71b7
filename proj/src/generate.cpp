#include "hodecomp/generate.hpp"

#include <random>

#include <fmt/format.h>

#include "hodecomp/optimize.hpp"
#include "hodecomp/syntax.hpp"
#include "hodecomp/types.hpp"

namespace hodecomp {

Coverage& Coverage::operator+=(const Coverage& o) {
  output += o.output;
  input += o.input;
  select += o.select;
  branch += o.branch;
  app += o.app;
  par += o.par;
  res += o.res;
  inact += o.inact;
  lin_abs += o.lin_abs;
  un_abs += o.un_abs;
  rec_names += o.rec_names;
  shared_names += o.shared_names;
  return *this;
}

bool Coverage::complete() const {
  for (int c : {output, input, select, branch, app, par, res, inact, lin_abs, un_abs, rec_names, shared_names})
    if (c <= 0) return false;
  return true;
}

std::string Coverage::summary() const {
  return fmt::format("output {} input {} select {} branch {} app {} par {} res {} inact {} lin-abs {} un-abs {} "
                     "rec-names {} shared-names {}",
                     output, input, select, branch, app, par, res, inact, lin_abs, un_abs, rec_names, shared_names);
}

namespace {

void cover(const ProcP& p, Coverage& c);

void cover(const ValP& v, Coverage& c) {
  if (auto a = as<AbsV>(v)) {
    (a->lin == Lin::lin ? c.lin_abs : c.un_abs)++;
    cover(a->body, c);
  }
}

void cover(const ProcP& p, Coverage& c) {
  std::visit(
      [&](auto&& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Output>) {
          ++c.output;
          for (auto& v : x.payload) cover(v, c);
          cover(x.cont, c);
        } else if constexpr (std::is_same_v<T, Input>) {
          ++c.input;
          cover(x.cont, c);
        } else if constexpr (std::is_same_v<T, Select>) {
          ++c.select;
          cover(x.cont, c);
        } else if constexpr (std::is_same_v<T, Branch>) {
          ++c.branch;
          for (auto& [l, q] : x.cases) cover(q, c);
        } else if constexpr (std::is_same_v<T, App>) {
          ++c.app;
          cover(x.fun, c);
        } else if constexpr (std::is_same_v<T, Par>) {
          ++c.par;
          cover(x.left, c);
          cover(x.right, c);
        } else if constexpr (std::is_same_v<T, Res>) {
          ++c.res;
          if (x.type && x.type->kind == TKind::Chan) ++c.shared_names;
          if (x.type && is_tail_recursive(x.type)) ++c.rec_names;
          cover(x.body, c);
        } else {
          ++c.inact;
        }
      },
      p->v);
}

const char* kLabels[] = {"left", "right", "ok", "quit"};

class Gen {
public:
  Gen(std::uint64_t seed, const GenOptions& o) : rng_(seed), o_(o) {}

  std::string process() {
    std::vector<std::string> parts;
    int pairs = 1 + pick(2);
    for (int i = 0; i < pairs; ++i) parts.push_back(session_pair());
    if (coin(o_.rec_rate)) parts.push_back(recursive_pair());
    if (coin(o_.shared_rate)) parts.push_back(shared_exchange());
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? " | (" : "(") + parts[i] + ")";
    return s;
  }

private:
  std::mt19937_64 rng_;
  GenOptions o_;
  int fresh_ = 0;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::string var(const std::string& base) { return base + std::to_string(fresh_++); }

  TypeP base_type() { return coin(0.5) ? t_int() : t_bool(); }

  // Payload types: base, an Int consumer, or a linear session consumer.
  TypeP payload(bool higher) {
    if (!higher) return base_type();
    switch (pick(4)) {
    case 0: return t_int();
    case 1: return t_bool();
    case 2: return t_sh({t_int()});
    default: return t_lin({session(1 + pick(2), false)});
    }
  }

  TypeP session(int len, bool higher) {
    if (len == 0) return t_end();
    switch (pick(6)) {
    case 0:
    case 1: return t_out({payload(higher)}, session(len - 1, higher));
    case 2:
    case 3: return t_in({payload(higher)}, session(len - 1, higher));
    default: {
      int a = pick(4), b = (a + 1 + pick(3)) % 4;
      Labels ls{{kLabels[a], session(len - 1, higher)}, {kLabels[b], session(len - 1, higher)}};
      return coin(0.5) ? t_sel(ls) : t_bra(ls);
    }
    }
  }

  std::string literal(const TypeP& t) {
    if (t->kind == TKind::Int) return std::to_string(pick(100));
    return coin(0.5) ? "true" : "false";
  }

  std::string value(const TypeP& u) {
    switch (u->kind) {
    case TKind::Int:
    case TKind::Bool: return literal(u);
    case TKind::Sh: {
      std::string x = var("x");
      if (coin(0.5)) return fmt::format("\\un({}:Int) -> 0", x);
      std::string q = var("q"), y = var("y");
      return fmt::format("\\un({}:Int) -> new {} : !<Int>;end in ({}!({}).0 | ~{}?({}).0)", x, q, q, pick(100), q, y);
    }
    default: {
      std::string z = var("z");
      TypeP s = u->items[0];
      return fmt::format("\\lin({}:{}) -> {}", z, show(s), impl(z, s));
    }
    }
  }

  // The received variable x of type u is used alongside cont.
  std::string use(const std::string& x, const TypeP& u, const std::string& cont) {
    switch (u->kind) {
    case TKind::Int:
    case TKind::Bool: return cont;
    case TKind::Sh: return fmt::format("(apply {} ({}) | {})", x, pick(100), cont);
    default: {
      std::string r = var("r");
      TypeP s = u->items[0];
      return fmt::format("((new {} : {} in (apply {} ({}) | {})) | {})", r, show(s), x, r, impl("~" + r, dual(s)), cont);
    }
    }
  }

  std::string impl(const std::string& ep, const TypeP& s) {
    switch (s->kind) {
    case TKind::End: return "0";
    case TKind::Out: return fmt::format("{}!({}).{}", ep, value(s->items[0]), impl(ep, s->next));
    case TKind::In: {
      std::string x = var("v");
      return fmt::format("{}?({}).{}", ep, x, use(x, s->items[0], impl(ep, s->next)));
    }
    case TKind::Sel: {
      auto& [l, c] = s->labels[pick(static_cast<int>(s->labels.size()))];
      return fmt::format("select {} {} . {}", ep, l, impl(ep, c));
    }
    case TKind::Bra: {
      std::string cs;
      for (std::size_t i = 0; i < s->labels.size(); ++i)
        cs += fmt::format("{}{}: {}", i ? " ; " : "", s->labels[i].first, impl(ep, s->labels[i].second));
      return fmt::format("branch {} {{ {} }}", ep, cs);
    }
    default: throw std::logic_error("generator: unexpected session type " + show(s));
    }
  }

  std::string session_pair() {
    TypeP s = session(1 + pick(o_.max_session), true);
    std::string n = var("s");
    std::string left = impl(n, s);
    if (coin(0.3)) {
      std::string u = var("u");
      left = fmt::format("apply (\\lin({}:{}) -> {}) ({})", u, show(s), impl(u, s), n);
    }
    return fmt::format("new {} : {} in ({} | {})", n, show(s), left, impl("~" + n, dual(s)));
  }

  // A tail-recursive name whose endpoints are kept alive by servers that
  // pass themselves on, as in the encoding of recursion.
  std::string recursive_pair() {
    std::vector<std::pair<bool, TypeP>> body; // (output, payload)
    int n = 1 + pick(2);
    for (int i = 0; i < n; ++i) body.emplace_back(coin(0.5), base_type());
    std::string sa = "rec t . ";
    for (auto& [out, t] : body) sa += (out ? "!<" : "?<") + show(t) + ">;";
    sa += "t";
    TypeP sat = parse_type(sa);
    std::string a = var("a");
    auto actions = [&](const std::string& ep, bool flip) {
      std::string s;
      for (auto& [out, t] : body) {
        if (out != flip) s += fmt::format("{}!({}).", ep, literal(t));
        else s += fmt::format("{}?({}).", ep, var("m"));
      }
      return s;
    };
    auto server = [&](const std::string& ep, const TypeP& t, bool flip) {
      std::string sy = fmt::format("rec t . ?<un({}, t)>;end", show(t));
      std::string s1 = var("s"), s2 = var("s"), xa = var("xa"), y = var("y"), zx = var("zx");
      std::string v = fmt::format("(\\un({}:{}, {}:{}) -> {}?({}).{}new {} : {} in (apply {} ({}, {}) | ~{}!({}).0))", xa,
                                  show(t), y, sy, y, zx, actions(xa, flip), s2, sy, zx, xa, s2, s2, zx);
      return fmt::format("{}new {} : {} in (apply {} ({}, {}) | ~{}!({}).0)", actions(ep, flip), s1, sy, v, ep, s1, s1,
                         v);
    };
    return fmt::format("new {} : {} in (({}) | ({}))", a, sa, server(a, sat, false), server("~" + a, dual(sat), true));
  }

  std::string shared_exchange() {
    std::string k = var("k"), f = var("f");
    if (coin(0.5)) return fmt::format("new {} : chan Int in ({}!({}).0 | {}?({}).0)", k, k, pick(100), k, f);
    return fmt::format("new {} : chan un(Int) in ({}!({}).0 | {}?({}).apply {} ({}))", k, k, value(t_sh({t_int()})), k,
                       f, f, pick(100));
  }
};

} // namespace

Coverage coverage(const ProcP& p) {
  Coverage c;
  cover(p, c);
  return c;
}

Generated generate_process(std::uint64_t seed, const GenOptions& o) {
  Gen g(seed, o);
  Generated out;
  out.text = g.process();
  out.process = parse_process(out.text);
  return out;
}

std::vector<Generated> generate_processes(std::size_t n, std::uint64_t seed, const GenOptions& o) {
  std::vector<Generated> out;
  for (std::uint64_t s = seed; out.size() < n; ++s) {
    Generated g = generate_process(s, o);
    if (max_prefix_depth(g.process, false) <= o.max_depth) out.push_back(std::move(g));
  }
  return out;
}

} // namespace hodecomp
