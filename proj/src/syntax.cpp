#include "hodecomp/syntax.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <optional>

namespace hodecomp {

std::string print_name(const Name& n) {
  std::string s = n.dual && !n.shared ? "~" : "";
  s += n.base;
  if (n.index) s += (n.base == "#" ? "" : "_") + std::to_string(n.index);
  return s;
}

namespace {

std::string print_lit(const Lit& l) {
  if (auto b = std::get_if<bool>(&l.v)) return *b ? "true" : "false";
  return std::to_string(std::get<std::int64_t>(l.v));
}

struct Printer {
  PrintOptions o;

  bool extends_right(const ProcP& p) const {
    if (as<Res>(p)) return true;
    if (auto x = as<Output>(p)) return extends_right(x->cont);
    if (auto x = as<Input>(p)) return extends_right(x->cont);
    if (auto x = as<Select>(p)) return extends_right(x->cont);
    return false;
  }

  std::string val(const ValP& v) const {
    if (auto x = as<VarV>(v)) return x->id;
    if (auto x = as<Lit>(v)) return print_lit(*x);
    if (auto x = as<NameV>(v)) return print_name(x->name);
    auto& a = std::get<AbsV>(v->v);
    std::string s = a.lin == Lin::lin ? "\\lin(" : "\\un(";
    for (std::size_t i = 0; i < a.params.size(); ++i) {
      if (i) s += ", ";
      s += print_name(a.params[i].name);
      if (o.annotations && a.params[i].type) s += ":" + show(a.params[i].type);
    }
    return s + ") -> " + proc(a.body);
  }

  std::string cont(const ProcP& p) const {
    if (as<Par>(p)) return "(" + proc(p) + ")";
    return proc(p);
  }

  std::string proc(const ProcP& p) const {
    return std::visit(
        [&](auto&& x) -> std::string {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Output>) {
            std::string s = print_name(x.subj) + "!(";
            for (std::size_t i = 0; i < x.payload.size(); ++i) s += (i ? ", " : "") + val(x.payload[i]);
            return s + ")." + cont(x.cont);
          } else if constexpr (std::is_same_v<T, Input>) {
            std::string s = print_name(x.subj) + "?(";
            for (std::size_t i = 0; i < x.binders.size(); ++i) s += (i ? ", " : "") + x.binders[i];
            return s + ")." + cont(x.cont);
          } else if constexpr (std::is_same_v<T, Select>) {
            return "select " + print_name(x.subj) + " " + x.label + " . " + cont(x.cont);
          } else if constexpr (std::is_same_v<T, Branch>) {
            std::string s = "branch " + print_name(x.subj) + " { ";
            for (std::size_t i = 0; i < x.cases.size(); ++i) s += (i ? " ; " : "") + x.cases[i].first + ": " + proc(x.cases[i].second);
            return s + " }";
          } else if constexpr (std::is_same_v<T, App>) {
            std::string f = val(x.fun);
            if (as<AbsV>(x.fun)) f = "(" + f + ")";
            std::string s = "apply " + f + " (";
            for (std::size_t i = 0; i < x.args.size(); ++i) {
              if (i) s += ", ";
              if (auto n = std::get_if<Name>(&x.args[i]))
                s += print_name(*n);
              else
                s += print_lit(std::get<Lit>(x.args[i]));
            }
            return s + ")";
          } else if constexpr (std::is_same_v<T, Par>) {
            std::string l = proc(x.left);
            if (as<Par>(x.left) || extends_right(x.left)) l = "(" + l + ")";
            return l + " | " + proc(x.right);
          } else if constexpr (std::is_same_v<T, Res>) {
            std::string s = "new " + print_name(x.name);
            if (o.annotations && x.type) s += " : " + show(x.type);
            return s + " in " + proc(x.body);
          } else {
            return "0";
          }
        },
        p->v);
  }
};

} // namespace

std::string print(const ValP& v, const PrintOptions& o) { return Printer{o}.val(v); }
std::string print(const ProcP& p, const PrintOptions& o) { return Printer{o}.proc(p); }

std::string print_pretty(const ProcP& p, const PrintOptions& o) {
  std::string out;
  std::function<void(const ProcP&, int)> go = [&](const ProcP& q, int depth) {
    std::string ind(static_cast<std::size_t>(depth) * 2, ' ');
    if (as<Res>(q)) {
      out += ind;
      ProcP b = q;
      while (auto r = as<Res>(b)) {
        out += "new " + print_name(r->name);
        if (o.annotations && r->type) out += " : " + show(r->type);
        out += " in ";
        b = r->body;
      }
      out += "(\n";
      go(b, depth + 1);
      out += ind + ")\n";
      return;
    }
    if (auto x = as<Par>(q)) {
      std::vector<ProcP> parts;
      std::function<void(const ProcP&)> flat = [&](const ProcP& y) {
        if (auto z = as<Par>(y)) {
          flat(z->left);
          flat(z->right);
        } else {
          parts.push_back(y);
        }
      };
      flat(q);
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (as<Res>(parts[i]) && i + 1 < parts.size()) {
          // A restriction extends to the right, so it is closed off.
          out += ind + "(\n";
          go(parts[i], depth + 1);
          out += ind + ")\n" + ind + "|\n";
        } else if (as<Res>(parts[i])) {
          go(parts[i], depth);
        } else {
          std::string s = print(parts[i], o);
          if (Printer{o}.extends_right(parts[i]) && i + 1 < parts.size()) s = "(" + s + ")";
          out += ind + s + (i + 1 < parts.size() ? " |" : "") + "\n";
        }
      }
      (void)x;
      return;
    }
    out += ind + print(q, o) + "\n";
  };
  go(p, 0);
  return out;
}

namespace {

enum class Tok { Ident, Reserved, Int, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '%'; };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if ((c == '-' && i + 1 < s.size() && s[i + 1] == '-') || (c == '/' && i + 1 < s.size() && s[i + 1] == '/')) {
      while (i < s.size() && s[i] != '\n') adv(1);
      continue;
    }
    int l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), l, cl});
      adv(j - i);
      continue;
    }
    if (c == '#') {
      std::size_t j = i + 1;
      while (j < s.size() && (ident_char(s[j]) || s[j] == ':' || s[j] == '~')) ++j;
      out.push_back({Tok::Reserved, s.substr(i, j - i), l, cl});
      adv(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Int, s.substr(i, j - i), l, cl});
      adv(j - i);
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Tok::Sym, "->", l, cl});
      adv(2);
      continue;
    }
    if (c == '=' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Tok::Sym, "=>", l, cl});
      adv(2);
      continue;
    }
    static const std::string syms = "(){}<>[],;:.|!?~+&\\=-";
    if (syms.find(c) != std::string::npos) {
      out.push_back({Tok::Sym, std::string(1, c), l, cl});
      adv(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

struct Binding {
  bool is_var = false;
  Name name;
  std::string var;
};

struct Parser {
  std::vector<Token> toks;
  std::size_t pos = 0;
  ParseOptions opts;
  std::vector<std::map<std::string, Binding>> scopes;
  std::vector<std::vector<std::string>> tscopes;
  std::map<std::string, TypeP> aliases;
  std::map<std::string, Name> declared;
  std::map<std::string, ValP> values;
  std::map<std::string, ProcP> procs;

  const Token& peek(std::size_t k = 0) const { return toks[std::min(pos + k, toks.size() - 1)]; }
  bool is_sym(const std::string& s, std::size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
  bool is_kw(const std::string& s, std::size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == s; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + (peek().kind == Tok::End ? " at end of input" : " near '" + peek().text + "'"), peek().line, peek().col);
  }
  void expect_sym(const std::string& s) {
    if (!is_sym(s)) fail("expected '" + s + "'");
    ++pos;
  }
  void expect_kw(const std::string& s) {
    if (!is_kw(s)) fail("expected '" + s + "'");
    ++pos;
  }
  bool accept_sym(const std::string& s) {
    if (is_sym(s)) {
      ++pos;
      return true;
    }
    return false;
  }

  static bool keyword(const std::string& s) {
    static const std::set<std::string> kws = {"new", "in", "select", "branch", "apply", "rec", "chan", "lin", "un", "end", "true", "false"};
    return kws.count(s) > 0;
  }

  std::string ident() {
    const Token& t = peek();
    if (t.kind == Tok::Reserved) {
      if (!opts.allow_reserved) fail("reserved identifier");
      ++pos;
      return t.text;
    }
    if (t.kind != Tok::Ident || keyword(t.text)) fail("expected identifier");
    if (!opts.allow_reserved && t.text.find('%') != std::string::npos) fail("reserved identifier");
    ++pos;
    return t.text;
  }

  // Splits "base_3" / "#3" into base and index.
  static std::pair<std::string, int> split(const std::string& text) {
    if (text.size() > 1 && text[0] == '#' && std::isdigit(static_cast<unsigned char>(text[1]))) {
      return {"#", std::stoi(text.substr(1))};
    }
    auto u = text.rfind('_');
    if (u != std::string::npos && u > 0 && u + 1 < text.size()) {
      bool digits = true;
      for (std::size_t k = u + 1; k < text.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(text[k]))) digits = false;
      if (digits) return {text.substr(0, u), std::stoi(text.substr(u + 1))};
    }
    return {text, 0};
  }

  const Binding* lookup(const std::string& text) const {
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      auto f = it->find(text);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  Name resolve_name(const std::string& text, bool dual) {
    auto [base, index] = split(text);
    Name n{base, index, dual, false};
    if (const Binding* b = lookup(text)) {
      if (b->is_var) {
        n = Name{b->var, 0, dual, false};
      } else {
        n = b->name;
        n.dual = dual;
      }
    } else if (auto d = declared.find(text); d != declared.end()) {
      n = d->second;
      n.dual = dual;
    } else if (base.rfind("#rec:", 0) == 0) {
      n.shared = true;
    }
    if (n.shared) n.dual = false;
    return n;
  }

  Name name_ref() {
    bool dual = accept_sym("~");
    return resolve_name(ident(), dual);
  }

  // Types.
  TypeP type() {
    if (is_kw("end")) {
      ++pos;
      return t_end();
    }
    if (is_sym("!") || is_sym("?")) {
      bool out = peek().text == "!";
      ++pos;
      expect_sym("<");
      TypeList ps;
      if (!is_sym(">")) {
        ps.push_back(type());
        while (accept_sym(",")) ps.push_back(type());
      }
      expect_sym(">");
      TypeP cont = t_end();
      if (accept_sym(";")) cont = type();
      return out ? t_out(ps, cont) : t_in(ps, cont);
    }
    if (is_sym("+") || is_sym("&")) {
      bool sel = peek().text == "+";
      ++pos;
      expect_sym("{");
      Labels ls;
      do {
        std::string l = ident();
        expect_sym(":");
        for (auto& e : ls)
          if (e.first == l) fail("duplicate label " + l);
        ls.emplace_back(l, type());
      } while (accept_sym(","));
      expect_sym("}");
      return sel ? t_sel(ls) : t_bra(ls);
    }
    if (is_kw("rec")) {
      ++pos;
      std::string v = ident();
      expect_sym(".");
      tscopes.push_back({v});
      TypeP b = type();
      tscopes.pop_back();
      return t_rec(v, b);
    }
    if (is_kw("chan")) {
      ++pos;
      return t_chan(type());
    }
    if (is_kw("lin") || is_kw("un")) {
      bool l = peek().text == "lin";
      ++pos;
      expect_sym("(");
      TypeList ps;
      if (!is_sym(")")) {
        ps.push_back(type());
        while (accept_sym(",")) ps.push_back(type());
      }
      expect_sym(")");
      return l ? t_lin(ps) : t_sh(ps);
    }
    if (is_kw("Int")) {
      ++pos;
      return t_int();
    }
    if (is_kw("Bool")) {
      ++pos;
      return t_bool();
    }
    if (accept_sym("(")) {
      TypeP t = type();
      expect_sym(")");
      return t;
    }
    if (peek().kind == Tok::Ident && !keyword(peek().text)) {
      std::string v = peek().text;
      ++pos;
      for (auto it = tscopes.rbegin(); it != tscopes.rend(); ++it)
        for (auto& b : *it)
          if (b == v) return t_var(v);
      auto a = aliases.find(v);
      if (a != aliases.end()) return a->second;
      return t_var(v);
    }
    fail("expected a type");
  }

  // Values.
  ValP value() {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      ++pos;
      return mk::lit(static_cast<std::int64_t>(std::stoll(t.text)));
    }
    if (is_kw("true") || is_kw("false")) {
      ++pos;
      return mk::lit(t.text == "true");
    }
    if (accept_sym("\\")) {
      Lin l;
      if (is_kw("lin"))
        l = Lin::lin;
      else if (is_kw("un"))
        l = Lin::sh;
      else
        fail("expected 'lin' or 'un'");
      ++pos;
      expect_sym("(");
      std::vector<Binder> ps;
      std::map<std::string, Binding> scope;
      if (!is_sym(")")) {
        do {
          std::string text = ident();
          auto [base, index] = split(text);
          TypeP ty;
          if (accept_sym(":")) ty = type();
          Name n{base, index, false, ty && ty->kind == TKind::Chan};
          for (auto& b : ps)
            if (b.name == n) fail("duplicate abstraction binder " + text);
          ps.push_back(Binder{n, ty});
          scope[text] = Binding{false, n, {}};
        } while (accept_sym(","));
      }
      expect_sym(")");
      expect_sym("->");
      scopes.push_back(scope);
      ProcP body = process();
      scopes.pop_back();
      return mk::abs(ps, l, body);
    }
    if (accept_sym("(")) {
      ValP v = value();
      expect_sym(")");
      return v;
    }
    if (is_sym("~")) {
      return mk::name(name_ref());
    }
    std::string text = ident();
    if (const Binding* b = lookup(text)) {
      if (b->is_var) return mk::var(b->var);
      return mk::name(b->name);
    }
    if (auto v = values.find(text); v != values.end()) return v->second;
    if (declared.count(text)) return mk::name(resolve_name(text, false));
    return mk::var(text);
  }

  Arg arg() {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      ++pos;
      return Lit{static_cast<std::int64_t>(std::stoll(t.text))};
    }
    if (is_kw("true") || is_kw("false")) {
      ++pos;
      return Lit{t.text == "true"};
    }
    return name_ref();
  }

  ProcP process() {
    std::vector<ProcP> parts{unary()};
    while (accept_sym("|")) parts.push_back(unary());
    return mk::par(parts);
  }

  ProcP unary() {
    const Token& t = peek();
    if (t.kind == Tok::Int && t.text == "0") {
      ++pos;
      return mk::nil();
    }
    if (accept_sym("(")) {
      ProcP p = process();
      expect_sym(")");
      return p;
    }
    if (is_kw("new")) {
      ++pos;
      std::string text = ident();
      auto [base, index] = split(text);
      TypeP ty;
      if (accept_sym(":")) ty = type();
      expect_kw("in");
      Name n{base, index, false, (ty && ty->kind == TKind::Chan) || base.rfind("#rec:", 0) == 0};
      scopes.push_back({{text, Binding{false, n, {}}}});
      ProcP body = process();
      scopes.pop_back();
      return mk::res(n, ty, body);
    }
    if (is_kw("select")) {
      ++pos;
      Name s = name_ref();
      std::string l = ident();
      expect_sym(".");
      return mk::sel(s, l, unary());
    }
    if (is_kw("branch")) {
      ++pos;
      Name s = name_ref();
      expect_sym("{");
      std::vector<std::pair<std::string, ProcP>> cs;
      do {
        if (is_sym("}")) break;
        std::string l = ident();
        expect_sym(":");
        for (auto& c : cs)
          if (c.first == l) fail("duplicate branch label " + l);
        cs.emplace_back(l, process());
      } while (accept_sym(";") || accept_sym(","));
      expect_sym("}");
      if (cs.empty()) fail("branch needs at least one label");
      return mk::bra(s, cs);
    }
    if (is_kw("apply")) {
      ++pos;
      ValP f = value();
      expect_sym("(");
      std::vector<Arg> args;
      if (!is_sym(")")) {
        args.push_back(arg());
        while (accept_sym(",")) args.push_back(arg());
      }
      expect_sym(")");
      return mk::app(f, args);
    }
    if (is_sym("~") || peek().kind == Tok::Reserved || peek().kind == Tok::Ident) {
      if (peek().kind == Tok::Ident && !is_sym("!", 1) && !is_sym("?", 1)) {
        auto p = procs.find(peek().text);
        if (p != procs.end()) {
          ++pos;
          return p->second;
        }
      }
      Name s = name_ref();
      if (accept_sym("!")) {
        expect_sym("(");
        std::vector<ValP> pay;
        if (!is_sym(")")) {
          pay.push_back(value());
          while (accept_sym(",")) pay.push_back(value());
        }
        expect_sym(")");
        ProcP cont = accept_sym(".") ? unary() : mk::nil();
        return mk::out(s, pay, cont);
      }
      if (accept_sym("?")) {
        expect_sym("(");
        std::vector<std::string> bs;
        std::map<std::string, Binding> scope;
        if (!is_sym(")")) {
          do {
            std::string b = ident();
            for (auto& x : bs)
              if (x == b) fail("duplicate input binder " + b);
            bs.push_back(b);
            scope[b] = Binding{true, {}, b};
          } while (accept_sym(","));
        }
        expect_sym(")");
        scopes.push_back(scope);
        ProcP cont = accept_sym(".") ? unary() : mk::nil();
        scopes.pop_back();
        return mk::in(s, bs, cont);
      }
      fail("expected '!' or '?' after subject");
    }
    fail("expected a process");
  }
};

// Renames binders clashing with free identifiers or earlier binders.
struct Uniquifier {
  std::set<std::pair<std::string, int>> used;
  std::set<std::string> used_vars;
  std::map<std::string, int> counters;

  std::string fresh(const std::string& base, int index) {
    for (;;) {
      std::string cand = base + "'" + std::to_string(++counters[base]);
      if (!used.count({cand, index}) && !used_vars.count(cand)) return cand;
    }
  }

  ValP val(const ValP& v) {
    if (auto a = as<AbsV>(v)) {
      Subst s;
      std::vector<Binder> ps;
      for (auto& b : a->params) {
        Binder nb = b;
        if (!b.name.reserved()) {
          if (used.count({b.name.base, b.name.index})) {
            nb.name.base = fresh(b.name.base, b.name.index);
            s.names[b.name] = nb.name;
          }
          used.insert({nb.name.base, nb.name.index});
        }
        ps.push_back(nb);
      }
      return mk::abs(ps, a->lin, proc(substitute(a->body, s)));
    }
    return v;
  }

  ProcP proc(const ProcP& p) {
    return std::visit(
        [&](auto&& x) -> ProcP {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Output>) {
            std::vector<ValP> pay;
            for (auto& v : x.payload) pay.push_back(val(v));
            return mk::out(x.subj, pay, proc(x.cont));
          } else if constexpr (std::is_same_v<T, Input>) {
            Subst s;
            std::vector<std::string> bs;
            for (auto& b : x.binders) {
              std::string nb = b;
              if (b.find('%') == std::string::npos && b[0] != '#') {
                if (used_vars.count(b) || used.count({b, 0})) {
                  nb = fresh(b, 0);
                  s.vars[b] = mk::var(nb);
                  s.names[Name{b, 0, false, false}] = Name{nb, 0, false, false};
                  s.names[Name{b, 0, true, false}] = Name{nb, 0, true, false};
                }
                used_vars.insert(nb);
                used.insert({nb, 0});
              }
              bs.push_back(nb);
            }
            ProcP c = s.empty() ? x.cont : substitute(x.cont, s);
            return mk::in(x.subj, bs, proc(c));
          } else if constexpr (std::is_same_v<T, Select>) {
            return mk::sel(x.subj, x.label, proc(x.cont));
          } else if constexpr (std::is_same_v<T, Branch>) {
            std::vector<std::pair<std::string, ProcP>> cs;
            for (auto& c : x.cases) cs.emplace_back(c.first, proc(c.second));
            return mk::bra(x.subj, cs);
          } else if constexpr (std::is_same_v<T, App>) {
            return mk::app(val(x.fun), x.args);
          } else if constexpr (std::is_same_v<T, Par>) {
            ProcP l = proc(x.left);
            return mk::par(l, proc(x.right));
          } else if constexpr (std::is_same_v<T, Res>) {
            Name n = x.name;
            ProcP body = x.body;
            if (!n.reserved()) {
              if (used.count({n.base, n.index})) {
                Name f = n;
                f.base = fresh(n.base, n.index);
                Subst s;
                s.names[n] = f;
                if (!n.shared) s.names[n.co()] = f.co();
                body = substitute(body, s);
                n = f;
              }
              used.insert({n.base, n.index});
            }
            return mk::res(n, x.type, proc(body));
          } else {
            return p;
          }
        },
        p->v);
  }
};

ProcP uniquify(const ProcP& p) {
  Uniquifier u;
  for (auto& n : free_names(p)) u.used.insert({n.base, n.index});
  for (auto& v : free_vars(p)) u.used_vars.insert(v);
  return u.proc(p);
}

Parser make_parser(const std::string& text, const ParseOptions& o) {
  Parser p;
  p.toks = lex(text);
  p.opts = o;
  return p;
}

} // namespace

ProcP parse_process(const std::string& text, const ParseOptions& o) {
  Parser p = make_parser(text, o);
  ProcP r = p.process();
  if (p.peek().kind != Tok::End) p.fail("trailing input");
  return o.barendregt ? uniquify(r) : r;
}

ValP parse_value(const std::string& text, const ParseOptions& o) {
  Parser p = make_parser(text, o);
  ValP v = p.value();
  if (p.peek().kind != Tok::End) p.fail("trailing input");
  if (!o.barendregt) return v;
  ProcP wrapped = uniquify(mk::app(v, {}));
  return as<App>(wrapped)->fun;
}

TypeP parse_type(const std::string& text) {
  Parser p = make_parser(text, {});
  TypeP t = p.type();
  if (p.peek().kind != Tok::End) p.fail("trailing input");
  if (!contractive(t)) throw ParseError("non-contractive recursive type", 1, 1);
  return t;
}

SourceFile parse_source(const std::string& text) {
  Parser p = make_parser(text, {});
  SourceFile f;
  while (p.peek().kind != Tok::End) {
    if (p.is_kw("type")) {
      ++p.pos;
      std::string n = p.ident();
      p.expect_sym("=");
      TypeP t = p.type();
      p.aliases[n] = t;
      f.aliases.emplace_back(n, t);
    } else if (p.is_kw("name")) {
      ++p.pos;
      bool dual = p.accept_sym("~");
      std::string text = p.ident();
      p.expect_sym(":");
      TypeP t = p.type();
      auto [base, index] = Parser::split(text);
      Name n{base, index, false, t->kind == TKind::Chan};
      p.declared[text] = n;
      n.dual = dual && !n.shared;
      f.free_names.emplace_back(n, t);
    } else if (p.is_kw("value")) {
      ++p.pos;
      std::string n = p.ident();
      p.expect_sym("=");
      ValP v = p.value();
      p.values[n] = v;
      f.values.emplace_back(n, as<App>(uniquify(mk::app(v, {})))->fun);
    } else if (p.is_kw("proc")) {
      ++p.pos;
      std::string n = p.ident();
      p.expect_sym("=");
      ProcP q = p.process();
      p.procs[n] = q;
      f.procs.emplace_back(n, uniquify(q));
    } else if (p.is_kw("main")) {
      ++p.pos;
      p.expect_sym("=");
      f.main = uniquify(p.process());
    } else if (p.is_kw("namepass")) {
      ++p.pos;
      f.namepass = true;
    } else if (p.is_kw("expect")) {
      int line = p.peek().line;
      ++p.pos;
      Expectation e;
      e.kind = Expectation::Kind::Minimal;
      e.line = line;
      auto reserved_term = [&]() {
        ParseOptions saved = p.opts;
        p.opts.allow_reserved = true;
        ProcP t = p.process();
        p.opts = saved;
        return t;
      };
      auto number = [&]() {
        if (p.peek().kind != Tok::Int) p.fail("expected a number");
        return std::stol(p.toks[p.pos++].text);
      };
      if (p.is_kw("degree")) {
        ++p.pos;
        e.kind = Expectation::Kind::Degree;
        e.target = p.is_kw("main") ? (++p.pos, std::string("main")) : p.ident();
        p.expect_sym("=");
        e.number = number();
      } else if (p.is_kw("source_steps") || p.is_kw("decomp_steps")) {
        e.kind = p.peek().text == "source_steps" ? Expectation::Kind::SourceSteps : Expectation::Kind::DecompSteps;
        ++p.pos;
        e.number = number();
        p.expect_sym("=>");
        e.term = reserved_term();
      } else if (p.is_kw("source_inert")) {
        ++p.pos;
        e.kind = Expectation::Kind::SourceInert;
        e.number = number();
      } else if (p.is_kw("encodes")) {
        ++p.pos;
        e.kind = Expectation::Kind::Encodes;
        e.term = reserved_term();
      } else if (p.is_kw("minimal")) {
        ++p.pos;
        e.kind = Expectation::Kind::Minimal;
      } else if (p.is_kw("gdecomp") || p.is_kw("rsdecomp")) {
        e.kind = p.peek().text == "gdecomp" ? Expectation::Kind::GDecomp : Expectation::Kind::RsDecomp;
        e.target = p.peek().text;
        ++p.pos;
        e.type = p.type();
        p.expect_sym("=");
        p.expect_sym("[");
        if (!p.accept_sym("]")) {
          e.types.push_back(p.type());
          while (p.accept_sym(",")) e.types.push_back(p.type());
          p.expect_sym("]");
        }
      } else if (p.is_kw("findex")) {
        ++p.pos;
        e.kind = Expectation::Kind::FIndex;
        e.target = "findex";
        e.type = p.type();
        p.expect_sym("=");
        e.number = number();
      } else {
        p.fail("unknown expectation");
      }
      f.expected.push_back(e);
    } else {
      p.fail("expected a declaration");
    }
    p.expect_sym(";");
  }
  bool needs_main = f.namepass || !f.procs.empty();
  for (auto& e : f.expected)
    if (e.kind != Expectation::Kind::GDecomp && e.kind != Expectation::Kind::RsDecomp && e.kind != Expectation::Kind::FIndex)
      needs_main = true;
  if (!f.main && needs_main) throw ParseError("missing main", 1, 1);
  return f;
}

} // namespace hodecomp
