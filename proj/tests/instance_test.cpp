#include <gtest/gtest.h>

#include "test_util.hpp"

namespace covax {
namespace {

using test::TempDir;
using test::write_text;

void write_small(const fs::path& dir, const std::string& bindings_extra = "",
                 const std::string& edges = "a\tb\n") {
  write_text(dir / "peptides.tsv", "# id\tsequence\na\tSIINFEKL\nb\tSIINFEKV\nc\tGILGFVFT\n");
  write_text(dir / "genotypes.tsv", "# id\tweight\nx\t0.25\ny\t0.75\n");
  write_text(dir / "bindings.tsv", "a\tx\t0.5\nb\ty\t0.3\nc\tx\t0\n" + bindings_extra);
  write_text(dir / "edges.tsv", edges);
}

std::string joined_issues(const fs::path& dir) {
  try {
    load_instance(dir);
  } catch (const InstanceError& e) {
    std::string all;
    for (const auto& issue : e.issues()) all += issue + "\n";
    return all;
  }
  return {};
}

TEST(Graph, KeepsSortedAdjacencyAndRejectsSelfLoops) {
  Graph g(4);
  EXPECT_TRUE(g.add_edge(2, 0));
  EXPECT_TRUE(g.add_edge(0, 1));
  EXPECT_FALSE(g.add_edge(1, 0));
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.neighbors(0), (std::vector<PeptideIndex>{1, 2}));
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_FALSE(g.has_edge(1, 2));
  EXPECT_THROW(g.add_edge(3, 3), std::invalid_argument);
  const auto edges = g.edges();
  ASSERT_EQ(edges.size(), 2u);
  EXPECT_EQ(edges[0], std::make_pair(PeptideIndex{0}, PeptideIndex{1}));
  EXPECT_EQ(edges[1], std::make_pair(PeptideIndex{0}, PeptideIndex{2}));
}

TEST(LoadInstance, ReadsValidDirectory) {
  TempDir dir("load");
  write_small(dir.path());
  const auto inst = load_instance(dir.path());
  EXPECT_EQ(inst.peptide_count(), 3u);
  EXPECT_EQ(inst.genotype_count(), 2u);
  EXPECT_TRUE(inst.has_sequences());
  EXPECT_EQ(inst.peptide_sequences[2], "GILGFVFT");
  EXPECT_DOUBLE_EQ(inst.probability(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(inst.probability(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(inst.probability(1, 1), 0.3);
  EXPECT_TRUE(inst.bindings_of(2).empty());
  EXPECT_EQ(inst.graph.edge_count(), 1u);
  EXPECT_TRUE(check_invariants(inst).empty());
}

TEST(LoadInstance, ProbabilityOneIsOutOfRange) {
  TempDir dir("prob1");
  write_small(dir.path(), "c\ty\t1.0\n");
  EXPECT_NE(joined_issues(dir.path()).find("probability out of range"), std::string::npos);
}

TEST(LoadInstance, NegativeAndNanProbabilitiesAreRejected) {
  TempDir dir("probneg");
  write_small(dir.path(), "c\ty\t-0.1\nb\tx\tnan\n");
  const auto issues = joined_issues(dir.path());
  EXPECT_NE(issues.find("bindings.tsv:4: probability out of range"), std::string::npos);
  EXPECT_NE(issues.find("bindings.tsv:5: "), std::string::npos);
}

TEST(LoadInstance, NearOneProbabilityIsClampedWithWarning) {
  TempDir dir("clamp");
  write_small(dir.path(), "c\ty\t0.9999999999\n");
  std::vector<std::string> warnings;
  const auto inst = load_instance(dir.path(), &warnings);
  EXPECT_DOUBLE_EQ(inst.probability(2, 1), kMaxProbability);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("clamped"), std::string::npos);
}

TEST(LoadInstance, UnknownEdgeEndpointIsNamed) {
  TempDir dir("unknown");
  write_small(dir.path(), "", "a\tzzz\n");
  EXPECT_NE(joined_issues(dir.path()).find("unknown peptide id 'zzz'"), std::string::npos);
}

TEST(LoadInstance, CollectsEveryProblem) {
  TempDir dir("many");
  write_small(dir.path(), "a\tx\t0.1\nq\tx\t0.2\n", "a\ta\n");
  const auto issues = joined_issues(dir.path());
  EXPECT_NE(issues.find("duplicate binding"), std::string::npos);
  EXPECT_NE(issues.find("unknown peptide id 'q'"), std::string::npos);
  EXPECT_NE(issues.find("self-loop"), std::string::npos);
}

TEST(LoadInstance, MissingFileIsReported) {
  TempDir dir("missing");
  write_small(dir.path());
  fs::remove(dir / "edges.tsv");
  EXPECT_NE(joined_issues(dir.path()).find("edges.tsv: missing file"), std::string::npos);
}

TEST(LoadInstance, DuplicateIdsAndMixedSequenceColumn) {
  TempDir dir("dup");
  write_small(dir.path());
  write_text(dir / "peptides.tsv", "a\tAAA\na\tCCC\nb\n");
  const auto issues = joined_issues(dir.path());
  EXPECT_NE(issues.find("peptides.tsv:2: duplicate id 'a'"), std::string::npos);
  EXPECT_NE(issues.find("peptides.tsv:3: sequence column"), std::string::npos);
}

TEST(LoadInstance, EdgeListedInBothOrientationsIsAccepted) {
  TempDir dir("mirror");
  write_small(dir.path(), "", "a\tb\nb\ta\n");
  EXPECT_EQ(load_instance(dir.path()).graph.edge_count(), 1u);
}

TEST(LoadInstance, MixedOrientationEdgeListIsAsymmetric) {
  TempDir dir("asym");
  write_small(dir.path(), "", "a\tb\nb\ta\na\tc\n");
  EXPECT_NE(joined_issues(dir.path()).find("asymmetric edge list: reverse of (a, c) missing"),
            std::string::npos);
}

TEST(SaveInstance, RoundTripsGeneratedInstances) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    GenParams p;
    p.n = 30;
    p.m_count = 40;
    p.edge_density = 0.1;
    p.weight_law = seed % 2 ? WeightLaw::dirichlet : WeightLaw::uniform;
    const auto inst = generate_synthetic(p, seed);
    TempDir dir("roundtrip");
    save_instance(inst, dir / "inst");
    EXPECT_EQ(load_instance(dir / "inst"), inst) << "seed " << seed;
  }
}

TEST(SaveInstance, ThreeByTwoRoundTrip) {
  const auto inst = test::make_instance({{0.5, 0.0}, {0.1, 0.2}, {0.0, 0.9}}, {1.0, 2.0}, {{0, 2}});
  TempDir dir("small");
  save_instance(inst, dir / "inst");
  const auto back = load_instance(dir / "inst");
  EXPECT_EQ(back.peptide_count(), 3u);
  EXPECT_EQ(back.genotype_count(), 2u);
  EXPECT_EQ(back, inst);
}

TEST(SaveInstance, UnwritableLocationThrows) {
  const auto inst = generate_adversarial(6);
  TempDir dir("ro");
  write_text(dir / "blocker", "not a directory");
  EXPECT_ANY_THROW(save_instance(inst, dir / "blocker" / "inst"));
}

TEST(GenerateSynthetic, IsDeterministic) {
  GenParams p;
  p.n = 10;
  p.m_count = 5;
  p.edge_density = 0.0;
  p.binding_sparsity = 1.0;
  p.prob_lo = 0.1;
  p.prob_hi = 0.9;
  p.weight_law = WeightLaw::uniform;
  EXPECT_EQ(generate_synthetic(p, 1), generate_synthetic(p, 1));
  EXPECT_NE(generate_synthetic(p, 1), generate_synthetic(p, 2));
}

TEST(GenerateSynthetic, EdgeDensityExtremes) {
  GenParams p = test::small_params(10, 5, 0.0);
  EXPECT_EQ(generate_synthetic(p, 4).graph.edge_count(), 0u);
  p.edge_density = 1.0;
  const auto complete = generate_synthetic(p, 4);
  EXPECT_EQ(complete.graph.edge_count(), 45u);
  EXPECT_EQ(max_degree(complete), 9u);
}

TEST(GenerateSynthetic, RespectsRangesAndInvariants) {
  GenParams p = test::small_params(40, 60, 0.1);
  p.prob_lo = 0.2;
  p.prob_hi = 0.4;
  const auto inst = generate_synthetic(p, 9);
  EXPECT_TRUE(check_invariants(inst).empty());
  EXPECT_NEAR(inst.total_weight(), 1.0, 1e-9);
  for (std::size_t v = 0; v < inst.peptide_count(); ++v) {
    EXPECT_EQ(inst.peptide_sequences[v].size(), p.sequence_length);
    for (const auto& b : inst.bindings_of(v)) {
      EXPECT_GE(b.probability, 0.2 - 1e-12);
      EXPECT_LE(b.probability, 0.4 + 1e-12);
    }
  }
}

TEST(GenerateSynthetic, RejectsTooFewPeptides) {
  GenParams p;
  p.n = 1;
  EXPECT_THROW(generate_synthetic(p, 1), std::invalid_argument);
}

TEST(GenerateAdversarial, MatchesConstruction) {
  const auto inst = generate_adversarial(6);
  EXPECT_EQ(inst.peptide_count(), 6u);
  EXPECT_EQ(inst.graph.edge_count(), 2u);
  EXPECT_TRUE(inst.graph.has_edge(0, 1));
  EXPECT_TRUE(inst.graph.has_edge(0, 2));
  EXPECT_EQ(max_degree(inst), 2u);
  EXPECT_EQ(inst.graph.degree(0), 2u);
  EXPECT_DOUBLE_EQ(inst.probability(0, 0), 0.9);
  EXPECT_DOUBLE_EQ(inst.probability(1, 1), 0.6);
  EXPECT_DOUBLE_EQ(inst.probability(2, 2), 0.6);
  EXPECT_DOUBLE_EQ(inst.probability(5, 5), 0.2);
  EXPECT_EQ(inst.binding_count(), 6u);
}

TEST(MaxDegree, EdgelessAndComplete) {
  EXPECT_EQ(max_degree(test::make_instance({{0.1}, {0.2}, {0.3}}, {1.0})), 0u);
  std::vector<std::pair<PeptideIndex, PeptideIndex>> edges;
  for (PeptideIndex a = 0; a < 5; ++a) {
    for (PeptideIndex b = a + 1; b < 5; ++b) edges.emplace_back(a, b);
  }
  EXPECT_EQ(max_degree(test::make_instance({{0.1}, {0.1}, {0.1}, {0.1}, {0.1}}, {1.0}, edges)), 4u);
}

TEST(CheckInvariants, FlagsBadProbabilitiesAndWeights) {
  auto inst = test::make_instance({{0.5}, {0.5}}, {1.0});
  inst.bindings[0][0].probability = 1.0;
  inst.weights[0] = -1.0;
  const auto issues = check_invariants(inst);
  EXPECT_GE(issues.size(), 2u);
}

}  // namespace
}  // namespace covax
