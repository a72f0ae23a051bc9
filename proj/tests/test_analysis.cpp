#include <doctest.h>

#include <random>

#include "repairqa/analysis.hpp"
#include "repairqa/parser.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace repairqa;

namespace {

// Independent validator for an R-stratification: i <= j across positive
// reliances, i < j across negative ones.
bool valid_r_stratification(const RuleSet& rules, const RelianceGraph& g,
                            const std::vector<std::vector<std::string>>& blocks) {
    std::map<std::string, std::size_t> block_of;
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (const std::string& label : blocks[b]) block_of[label] = b;
    if (block_of.size() != rules.size()) return false;
    for (const auto& [from, to] : g.pos_edges)
        if (block_of.at(rules.at(from).label()) > block_of.at(rules.at(to).label())) return false;
    for (const auto& [from, to] : g.neg_edges)
        if (block_of.at(rules.at(from).label()) >= block_of.at(rules.at(to).label())) return false;
    return true;
}

bool valid_predicate_labeling(const RuleSet& rules, const std::map<std::string, int>& l) {
    for (const Rule& r : rules)
        for (const Atom& h : r.head()) {
            for (const Atom& b : r.body_pos())
                if (l.at(h.predicate()) < l.at(b.predicate())) return false;
            for (const Atom& b : r.body_neg())
                if (l.at(h.predicate()) <= l.at(b.predicate())) return false;
        }
    return true;
}

Rule randomly_renamed(const Rule& r, std::mt19937& rng) {
    std::map<std::string, std::string> rename;
    std::size_t k = 0;
    for (const std::string& v : r.univ_vars())
        rename[v] = "w" + std::to_string(rng() % 1000) + "_" + std::to_string(k++);
    for (const std::string& v : r.exist_vars())
        rename[v] = "w" + std::to_string(rng() % 1000) + "_" + std::to_string(k++);
    return r.renamed(r.label(), rename);
}

}  // namespace

TEST_CASE("reliance on the running example") {
    RuleSet rules = testutil::ex1_program().rules;
    const Rule& r1 = rules.by_label("r1");
    const Rule& r2 = rules.by_label("r2");
    const Rule& r3 = rules.by_label("r3");
    const Rule& r4 = rules.by_label("r4");

    CHECK(positively_relies(r2, r3));   // r2's cave output feeds r3
    CHECK(positively_relies(r1, rules.by_label("r5")));
    CHECK_FALSE(positively_relies(r3, r1));

    CHECK(negatively_relies(r1, r4));   // CanFly blocks the default
    CHECK_FALSE(negatively_relies(r2, r4));
    for (const Rule& r : rules) CHECK_FALSE(negatively_relies(r, r2));  // r2 has no negation
}

TEST_CASE("reliance graph of the running example") {
    RuleSet rules = testutil::ex1_program().rules;
    RelianceGraph g = reliance_graph(rules);

    auto idx = [&](const char* l) { return rules.index_of(l); };
    CHECK(g.has_pos(idx("r1"), idx("r5")));
    CHECK(g.has_pos(idx("r2"), idx("r3")));
    CHECK(g.has_pos(idx("r5"), idx("r6")));
    CHECK(g.has_pos(idx("r5"), idx("r7")));
    CHECK(g.has_pos(idx("r3"), idx("r6")));
    CHECK(g.neg_edges == std::set<std::pair<std::size_t, std::size_t>>{{idx("r1"), idx("r4")}});
}

TEST_CASE("reliance matches the wider-universe oracle") {
    RuleSet rules = testutil::ex1_program().rules;
    for (const Rule& a : rules)
        for (const Rule& b : rules) {
            CHECK(positively_relies(a, b) == oracles::oracle_pos_relies(a, b, 2));
            CHECK(negatively_relies(a, b) == oracles::oracle_neg_relies(a, b, 2));
        }
}

TEST_CASE("reliance is invariant under renaming") {
    RuleSet rules = testutil::ex1_program().rules;
    std::mt19937 rng(42);
    for (int round = 0; round < 50; ++round) {
        std::size_t i = rng() % rules.size();
        std::size_t j = rng() % rules.size();
        Rule a = randomly_renamed(rules.at(i), rng);
        Rule b = randomly_renamed(rules.at(j), rng);
        CHECK(positively_relies(a, b) == positively_relies(rules.at(i), rules.at(j)));
        CHECK(negatively_relies(a, b) == negatively_relies(rules.at(i), rules.at(j)));
    }
}

TEST_CASE("R-acyclicity") {
    CHECK(is_r_acyclic(testutil::ex1_program().rules));

    RuleSet cycle = parse_program(testutil::read_fixture("cycle.rules")).rules;
    CHECK_FALSE(is_r_acyclic(cycle));

    CHECK(is_r_acyclic(RuleSet()));

    // A cycle through existential-free rules is fine.
    RuleSet loop = parse_program("a1: P(x) -> Q(x). a2: Q(x) -> P(x).").rules;
    CHECK(is_r_acyclic(loop));
}

TEST_CASE("R-stratification") {
    RuleSet rules = testutil::ex1_program().rules;
    RelianceGraph g = reliance_graph(rules);
    auto blocks = r_stratify(rules, g);
    REQUIRE(blocks.has_value());
    CHECK(valid_r_stratification(rules, g, *blocks));

    // r1 must come strictly before r4.
    std::map<std::string, std::size_t> block_of;
    for (std::size_t b = 0; b < blocks->size(); ++b)
        for (const std::string& label : (*blocks)[b]) block_of[label] = b;
    CHECK(block_of.at("r1") < block_of.at("r4"));

    // A rule negatively relying on itself cannot be stratified.
    RuleSet self = parse_program("s1: P(x), not Q(x) -> Q(x).").rules;
    RelianceGraph sg = reliance_graph(self);
    CHECK(sg.has_neg(0, 0));
    CHECK_FALSE(r_stratify(self, sg).has_value());

    // Negation-free sets always stratify.
    RuleSet free = parse_program("f1: P(x) -> Q(x). f2: Q(x) -> P(x).").rules;
    RelianceGraph fg = reliance_graph(free);
    CHECK(fg.neg_edges.empty());
    auto fblocks = r_stratify(free, fg);
    REQUIRE(fblocks.has_value());
    CHECK(valid_r_stratification(free, fg, *fblocks));
}

TEST_CASE("guardedness") {
    CHECK(is_guarded(testutil::ex1_program().rules));
    CHECK_FALSE(is_guarded(parse_program("g1: P(x), Q(y) -> R(x,y).").rules));
    CHECK(is_guarded(parse_program("g1: S(x,y), Q(y) -> R(x,y).").rules));
    CHECK(is_guarded(parse_program("g1: Ready -> Go.").rules));  // no variables
}

TEST_CASE("predicate stratification") {
    RuleSet rules = testutil::ex1_program().rules;
    auto l = predicate_stratify(rules);
    REQUIRE(l.has_value());
    CHECK(valid_predicate_labeling(rules, *l));
    CHECK(l->at("CanFly") < l->at("CanNotFly"));

    auto l2 = predicate_stratify(parse_program("s1: P(x), not P(x) -> Q(x).").rules);
    REQUIRE(l2.has_value());  // l(Q) > l(P) suffices
    CHECK(l2->at("Q") > l2->at("P"));

    CHECK_FALSE(predicate_stratify(parse_program("s1: P(x), not Q(x) -> Q(x).").rules));
}

TEST_CASE("random rule pairs agree with the oracle") {
    std::mt19937 rng(2024);
    oracles::RandomInstanceOptions opt;
    opt.max_rules = 4;
    opt.constraints = 1;
    for (int round = 0; round < 30; ++round) {
        auto inst = oracles::random_instance(rng, opt);
        for (const Rule& a : inst.rules)
            for (const Rule& b : inst.rules) {
                CAPTURE(a.to_string());
                CAPTURE(b.to_string());
                CHECK(positively_relies(a, b) == oracles::oracle_pos_relies(a, b, 2));
                CHECK(negatively_relies(a, b) == oracles::oracle_neg_relies(a, b, 2));
            }
    }
}

TEST_CASE("analyze assembles the class report") {
    ClassReport report = analyze(testutil::ex1_program().rules);
    CHECK(report.r_acyclic);
    CHECK(report.guarded);
    CHECK(report.r_stratification.has_value());
    CHECK(report.stratification.has_value());
}
