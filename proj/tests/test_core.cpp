#include <doctest.h>

#include <random>

#include "repairqa/core.hpp"
#include "testutil.hpp"

using namespace repairqa;

TEST_CASE("terms compare structurally and cache groundness") {
    Term a = Term::constant("a");
    Term x = Term::variable("x");
    Term sk = Term::skolem({"r2", "y"}, {a});

    CHECK(a.is_ground());
    CHECK_FALSE(x.is_ground());
    CHECK(sk.is_ground());
    CHECK(sk.depth() == 1);
    CHECK(Term::skolem({"r2", "y"}, {sk}).depth() == 2);

    CHECK(a == Term::constant("a"));
    CHECK(a != Term::constant("b"));
    CHECK(Term::constant("x") != Term::variable("x"));  // disjoint namespaces
    CHECK(sk == Term::skolem({"r2", "y"}, {Term::constant("a")}));
    CHECK(sk != Term::skolem({"r3", "y"}, {Term::constant("a")}));
    CHECK(sk.to_string() == "f_r2_y(a)");
}

TEST_CASE("match_atom extends bindings minimally") {
    Binding empty;

    SUBCASE("single variable") {
        auto b = match_atom(testutil::atom("Bat(x)"), testutil::atom("Bat(a)"), empty);
        REQUIRE(b.has_value());
        CHECK(*b->lookup("x") == Term::constant("a"));
    }
    SUBCASE("repeated variable clash") {
        auto b = match_atom(testutil::atom("LiveIn(x,x)"), testutil::atom("LiveIn(a,b)"), empty);
        CHECK_FALSE(b.has_value());
    }
    SUBCASE("extends a partial binding onto a skolem term") {
        Atom fact("LiveIn", {Term::constant("a"), Term::skolem({"r2", "y"}, {Term::constant("a")})});
        Binding start;
        start.bind("x", Term::constant("a"));
        auto b = match_atom(testutil::atom("LiveIn(x,y)"), fact, start);
        REQUIRE(b.has_value());
        CHECK(*b->lookup("x") == Term::constant("a"));
        CHECK(*b->lookup("y") == Term::skolem({"r2", "y"}, {Term::constant("a")}));
    }
    SUBCASE("conflicting prior binding fails") {
        Binding start;
        start.bind("x", Term::constant("b"));
        CHECK_FALSE(match_atom(testutil::atom("Bat(x)"), testutil::atom("Bat(a)"), start));
    }
}

TEST_CASE("apply_substitution") {
    Binding b;
    b.bind("x", Term::constant("a"));

    CHECK(apply_substitution(testutil::atom("CanFly(x)"), b) == testutil::atom("CanFly(a)"));
    CHECK(apply_substitution(testutil::atom("Bat(a)"), Binding()) == testutil::atom("Bat(a)"));

    Binding unrelated;
    unrelated.bind("y", Term::constant("a"));
    CHECK_THROWS_AS(apply_substitution(testutil::atom("Trogloxene(x)"), unrelated, true),
                    UnboundVariableError);
}

TEST_CASE("match then substitute reproduces the fact") {
    std::mt19937 rng(7);
    std::vector<std::string> preds = {"P", "Q", "R"};
    std::vector<Term> ground_terms = {Term::constant("a"), Term::constant("b"),
                                      Term::skolem({"r1", "z"}, {Term::constant("a")})};
    std::vector<std::string> vars = {"x", "y", "z1"};

    for (int round = 0; round < 200; ++round) {
        std::size_t arity = rng() % 3 + 1;
        std::string pred = preds[rng() % preds.size()];
        TermList fact_args, pattern_args;
        for (std::size_t i = 0; i < arity; ++i) {
            Term g = ground_terms[rng() % ground_terms.size()];
            fact_args.push_back(g);
            if (rng() % 2)
                pattern_args.push_back(Term::variable(vars[rng() % vars.size()]));
            else
                pattern_args.push_back(g);
        }
        Atom fact(pred, fact_args), pattern(pred, pattern_args);
        auto b = match_atom(pattern, fact);
        if (b) CHECK(apply_substitution(pattern, *b, true) == fact);
    }
}

TEST_CASE("rule construction enforces safety") {
    auto P_x = testutil::atom("P(x)");
    auto Q_x = testutil::atom("Q(x)");
    auto Q_y = testutil::atom("Q(y)");

    CHECK_NOTHROW(Rule("r", {P_x}, {}, {Q_x}, {}));
    // not P(x) -> Q(x): x has no positive occurrence
    CHECK_THROWS_AS(Rule("r", {}, {P_x}, {Q_x}, {}), DomainError);
    // P(x) -> Q(y): y is universal but not in the body
    CHECK_THROWS_AS(Rule("r", {P_x}, {}, {Q_y}, {}), DomainError);
    // existential y must not occur in the body
    CHECK_THROWS_AS(Rule("r", {P_x, Q_y}, {}, {testutil::atom("R(x,y)")}, {"y"}), DomainError);
    // constraints cannot be existential
    CHECK_THROWS_AS(Rule("r", {P_x}, {}, {Atom::falsum()}, {"y"}), DomainError);
    // falsum in a body is reserved
    CHECK_THROWS_AS(Rule("r", {Atom::falsum()}, {}, {Q_x}, {}), DomainError);
    // P(x) -> exists y . R(x,y) is fine
    CHECK_NOTHROW(Rule("r", {P_x}, {}, {testutil::atom("R(x,y)")}, {"y"}));
}

TEST_CASE("skolemized heads are injective per rule and variable") {
    Rule ra("rA", {testutil::atom("P(x)")}, {}, {testutil::atom("R(x,y)")}, {"y"});
    Rule rb("rB", {testutil::atom("P(x)")}, {}, {testutil::atom("R(x,y)")}, {"y"});

    AtomList ha = ra.skolemized_head();
    AtomList hb = rb.skolemized_head();
    REQUIRE(ha.size() == 1);
    CHECK(ha[0].args()[1].is_skolem());
    CHECK(ha[0].args()[1].skolem_fn().rule_label == "rA");
    CHECK_FALSE(ha[0] == hb[0]);
}

TEST_CASE("rule sets demand unique labels") {
    Rule r1("r1", {testutil::atom("P(x)")}, {}, {testutil::atom("Q(x)")}, {});
    Rule r1_dup("r1", {testutil::atom("Q(x)")}, {}, {testutil::atom("P(x)")}, {});
    CHECK_THROWS_AS(RuleSet({r1, r1_dup}), DomainError);
}

TEST_CASE("databases hold ground constant facts only") {
    CHECK_NOTHROW(Database({testutil::atom("Bat(a)")}));
    CHECK_THROWS_AS(Database({testutil::atom("Bat(x)")}), DomainError);
    CHECK_THROWS_AS(Database({Atom::falsum()}), DomainError);
    Atom with_null("P", {Term::skolem({"r", "z"}, {})});
    CHECK_THROWS_AS(Database({with_null}), DomainError);
}

TEST_CASE("instances are extensional") {
    Instance a(testutil::atoms({"P(a)", "Q(b)"}));
    Instance b(testutil::atoms({"Q(b)", "P(a)", "P(a)"}));
    CHECK(a == b);
    CHECK(a.contains(testutil::atom("P(a)")));
    CHECK_FALSE(a.contains(testutil::atom("P(b)")));
}

TEST_CASE("queries reject nulls and falsum") {
    CHECK_THROWS_AS(Query({Atom("P", {Term::skolem({"r", "z"}, {})})}, {}), DomainError);
    CHECK_THROWS_AS(Query({Atom::falsum()}, {}), DomainError);
}
