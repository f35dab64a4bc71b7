#include "hodecomp/corpus.hpp"

#include <algorithm>

namespace hodecomp {

namespace {

// Name-passing exchange: the passed endpoint is used by the sender afterwards.
const char* kNamePassing = R"(
namepass;
main = new m : ?<Bool>;end in new n : !<?<Bool>;end>;end in (n!(m).~m!(true).0 | ~n?(x).x?(b).0);

value V = \lin(z) -> z?(x).apply x (m);
value Wp = \lin(z) -> z?(x).apply x (true);
proc Q = n!(V).~m!(Wp).0;
proc R = ~n?(y).new s in (apply y (s) | ~s!(\lin(x) -> x?(y).new s in (apply y (s) | ~s!(\lin(b) -> 0).0)).0);

expect encodes new m in new n in (Q | R);
expect degree V = 2;
expect degree Q = 7;
expect degree R = 11;
expect degree main = 19;
expect source_steps 4 => new m in (~m!(\lin(z) -> z?(x).apply x (true)).0 | m?(y).new s in (apply y (s) | ~s!(\lin(b) -> 0).0));
expect source_inert 8;
expect minimal;
)";

// A channel is passed and a Boolean is sent back over it.
const char* kBooleanExchange = R"(
namepass;
name m : !<Bool>;end;
name ~m : ?<Bool>;end;
main = new u : !<!<Bool>;end>;end in (u!(m).~m?(b).0 | ~u?(x).x!(true).0);

value V = \lin(z) -> z?(x).apply x (m);
value Wp = \lin(z) -> z?(x).apply x (true);
value W = \lin(x) -> x!(Wp).0;
proc Q = u!(V).~m?(y).new s in (apply y (s) | ~s!(\lin(b) -> 0).0);
proc R = ~u?(y).new s in (apply y (s) | ~s!(W).0);

expect encodes new u in (Q | R);
expect degree V = 2;
expect degree Wp = 2;
expect degree W = 4;
expect degree Q = 9;
expect degree R = 9;
expect degree main = 19;

expect source_steps 4 =>
  (~m?(y).new s in (apply y (s) | ~s!(\lin(b) -> 0).0)) | m!(\lin(z) -> z?(x).apply x (true)).0;
expect source_inert 8;

expect decomp_steps 7 =>
  new #3 in new #4 in new #5 in new #6 in new #7 in new #8 in new #9 in new #10 in
  new #15 in new #16 in new #17 in new #18 in new #19 in (
    ~#5!().0
  | #5?().~m_1?(y).~#6!(y).0
  | new s_1 in (
        #6?(y).~#7!(y).~#8!().0
      | #7?(y).apply y (s_1)
      | #8?().~s_1!(\lin(b) -> ~#9!().0 | #9?().0).~#10!().0
      | #10?().0)
  | new s_1 in (
        apply (\lin(z) -> ~#3!().0 | #3?().z?(x).~#4!(x).0 | #4?(x).apply x (m_1)) (s_1)
      | ~s_1!(\lin(x) -> ~#15!().0
                       | #15?().x!(\lin(z) -> ~#16!().0 | #16?().z?(x).~#17!(x).0 | #17?(x).apply x (true)).~#18!().0
                       | #18?().0).~#19!().0
      | #19?().0));

expect decomp_steps 15 =>
  new #6 in new #7 in new #8 in new #9 in new #10 in new #16 in new #17 in new #18 in (
    ~m_1?(y).~#6!(y).0
  | m_1!(\lin(z) -> ~#16!().0 | #16?().z?(x).~#17!(x).0 | #17?(x).apply x (true)).~#18!().0
  | #18?().0
  | new s_1 in (
        #6?(y).~#7!(y).~#8!().0
      | #7?(y).apply y (s_1)
      | #8?().~s_1!(\lin(b) -> ~#9!().0 | #9?().0).~#10!().0
      | #10?().0));

expect minimal;
)";

// Types of the integer equality service, without a process.
const char* kEqualityService = R"(
type S = ?<Int>;?<Int>;!<Bool>;end;
type R = rec t . ?<Int>;?<Bool>;!<Bool>;t;
type T = ?<Bool>;!<Bool>;rec t . ?<Int>;?<Bool>;!<Bool>;t;

expect gdecomp S = [?<Int>;end, ?<Int>;end, !<Bool>;end];
expect gdecomp R = [rec t . ?<Int>;t, rec t . ?<Bool>;t, rec t . !<Bool>;t];
expect rsdecomp T = [rec t . ?<Int>;t, rec t . ?<Bool>;t, rec t . !<Bool>;t];
expect findex R = 1;
expect findex T = 2;
)";

// Encoding of a recursive process that forwards what it reads on a.
const char* kRecursion = R"(
type Sa = rec t . ?<Int>;!<Int>;t;
type Sy = rec t . ?<un(Sa, t)>;end;
name a : Sa;

value V = \un(xa:Sa, y:Sy) -> y?(zx).xa?(m).xa!(m).new s : Sy in (apply zx (xa, s) | ~s!(zx).0);
main = a?(m).a!(m).new s : Sy in (apply V (a, s) | ~s!(V).0);

expect degree V = 0;
expect degree main = 7;

expect decomp_steps 3 =>
  new #2 in new #3 in new #4 in new #5 in new #6 in new #7 in new #rec:a in (
    a_1?(m).~#2!(m).#rec:a?(b).apply b (a_1, a_2)
  | #2?(m).#rec:a!(\lin(z1, z2) -> z2!(m).~#3!().#rec:a?(b).apply b (z1, z2)).0
  | new s_1 in (
        #3?().~#4!().~#5!().0
      | #4?().#rec:a!(\lin(z1, z2) -> apply (
            \un(xa1, xa2, y1) -> new #5 in new #6 in new #7 in new #8 in new #9 in new #10 in new #11 in
              new #rec:xa in (
                #rec:xa?(b).apply b (xa1, xa2)
              | ~#5!().0
              | #5?().y1?(zx).~#6!(zx).0
              | #6?(zx).#rec:xa!(\lin(z1, z2) -> z1?(m).~#7!(zx, m).#rec:xa?(b).apply b (z1, z2)).0
              | #7?(zx, m).#rec:xa!(\lin(z1, z2) -> z2!(m).~#8!(zx).#rec:xa?(b).apply b (z1, z2)).0
              | new s1 in (
                    #8?(zx).~#9!(zx).~#10!(zx).0
                  | #9?(zx).#rec:xa!(\lin(z1, z2) -> apply zx (z1, z2, s1)).0
                  | #10?(zx).~s1!(zx).~#11!().0
                  | #11?().0))) (z1, z2, s_1)).0
      | #5?().~s_1!(
            \un(xa1, xa2, y1) -> new #6 in new #7 in new #8 in new #9 in new #10 in new #11 in new #12 in
              new #rec:xa in (
                #rec:xa?(b).apply b (xa1, xa2)
              | ~#6!().0
              | #6?().y1?(zx).~#7!(zx).0
              | #7?(zx).#rec:xa!(\lin(z1, z2) -> z1?(m).~#8!(zx, m).#rec:xa?(b).apply b (z1, z2)).0
              | #8?(zx, m).#rec:xa!(\lin(z1, z2) -> z2!(m).~#9!(zx).#rec:xa?(b).apply b (z1, z2)).0
              | new s1 in (
                    #9?(zx).~#10!(zx).~#11!(zx).0
                  | #10?(zx).#rec:xa!(\lin(z1, z2) -> apply zx (z1, z2, s1)).0
                  | #11?(zx).~s1!(zx).~#12!().0
                  | #12?().0))).~#7!().0
      | #7?().0));

expect minimal;
)";

// Math server offering addition and subtraction; the client adds 16 and 26.
const char* kSelection = R"(
type Calc = &{add: !<un(Int, Int)>;end, sub: !<un(Int, Int)>;end};
value Vadd = \un(a:Int, b:Int) -> 0;
value Vsub = \un(a:Int, b:Int) -> 0;
proc Q = branch u { add: u!(Vadd).0 ; sub: u!(Vsub).0 };
proc R = select ~u add . ~u?(x).apply x (16, 26);
main = new u : Calc in (Q | R);

expect degree Q = 1;
expect degree R = 4;
expect degree main = 6;

expect source_steps 1 => new u in (u!(Vadd).0 | ~u?(x).apply x (16, 26));
expect source_steps 2 => apply (\un(a, b) -> 0) (16, 26);
expect source_inert 3;

expect decomp_steps 4 =>
  new #5 in new #6 in new u_1 in (
    branch u_1 {
      add: u_1!(\lin(y1) -> new #3 in new #4 in (
             ~#3!().0
           | #3?().y1!(\un(a, b) -> new #4 in (~#4!().0 | #4?().0)).~#4!().0
           | #4?().0)).0 ;
      sub: u_1!(\lin(y1) -> new #3 in new #4 in (
             ~#3!().0
           | #3?().y1!(\un(a, b) -> new #4 in (~#4!().0 | #4?().0)).~#4!().0
           | #4?().0)).0 }
  | new u_2 in (
        apply (\lin(y1) -> select ~u_1 add . ~u_1?(z).~#5!().apply z (y1)) (~u_2)
      | #5?().u_2?(x).~#6!(x).0
      | #6?(x).apply x (16, 26)));

expect decomp_steps 6 =>
  new #5 in new #6 in new u_1 in (
    u_1!(\lin(y1) -> new #3 in new #4 in (
           ~#3!().0
         | #3?().y1!(\un(a, b) -> new #4 in (~#4!().0 | #4?().0)).~#4!().0
         | #4?().0)).0
  | new u_2 in (
        ~u_1?(z).~#5!().apply z (~u_2)
      | #5?().u_2?(x).~#6!(x).0
      | #6?(x).apply x (16, 26)));

expect decomp_steps 8 =>
  new #6 in new u_2 in (
    apply (\lin(y1) -> new #3 in new #4 in (
           ~#3!().0
         | #3?().y1!(\un(a, b) -> new #4 in (~#4!().0 | #4?().0)).~#4!().0
         | #4?().0)) (~u_2)
  | u_2?(x).~#6!(x).0
  | #6?(x).apply x (16, 26));

expect minimal;
)";

std::vector<CorpusEntry> make_corpus() {
  std::vector<CorpusEntry> c{
      {"boolean-exchange", "channel passing with a Boolean sent back", kBooleanExchange, true},
      {"equality-service", "session types of an integer equality service", kEqualityService, false},
      {"math-server", "selection and branching on a math server", kSelection, true},
      {"name-passing", "passing a linear endpoint by abstraction", kNamePassing, true},
      {"recursion", "encoding of a recursive forwarder", kRecursion, false},
  };
  std::sort(c.begin(), c.end(), [](auto& a, auto& b) { return a.name < b.name; });
  return c;
}

} // namespace

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> c = make_corpus();
  return c;
}

const CorpusEntry* find_corpus_entry(std::string_view name) {
  for (auto& e : corpus())
    if (e.name == name) return &e;
  return nullptr;
}

} // namespace hodecomp
