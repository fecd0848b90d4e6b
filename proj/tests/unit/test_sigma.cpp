#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oppsched/error.hpp"
#include "oppsched/sigma.hpp"

namespace oppsched::sigma {
namespace {

using Blocks = std::vector<IndexSet>;

TEST(Sigma, GenerateSeparatesBySignature) {
  const FiniteSpace w(4);
  const std::vector<IndexSet> sets{{0, 1}, {0, 2}};
  EXPECT_EQ(generate(w, sets).blocks(), (Blocks{{0}, {1}, {2}, {3}}));
}

TEST(Sigma, GenerateEmptyIsTrivial) {
  const FiniteSpace w(5);
  EXPECT_EQ(generate(w, {}), Partition::trivial(w));
}

TEST(Sigma, GenerateSingleSet) {
  const FiniteSpace w(4);
  const std::vector<IndexSet> sets{{1, 3}};
  EXPECT_EQ(generate(w, sets).blocks(), (Blocks{{0, 2}, {1, 3}}));
}

TEST(Sigma, JoinOfCrossingPairsIsSingletons) {
  const FiniteSpace w(4);
  const std::vector<Partition> parts{Partition(w, {{0, 1}, {2, 3}}),
                                     Partition(w, {{0, 2}, {1, 3}})};
  EXPECT_EQ(join(parts), Partition::singletons(w));
}

TEST(Sigma, JoinWithTrivialIsIdentity) {
  const FiniteSpace w(5);
  const Partition p(w, {{0, 4}, {1, 2}, {3}});
  const std::vector<Partition> parts{p, Partition::trivial(w)};
  EXPECT_EQ(join(parts), p);
}

TEST(Sigma, JoinRejectsEmptyList) {
  EXPECT_THROW(join({}), InputError);
}

TEST(Sigma, PartitionCanonicalForm) {
  const FiniteSpace w(5);
  const Partition p(w, {{4, 3}, {2, 0}, {1}});
  EXPECT_EQ(p.blocks(), (Blocks{{0, 2}, {1}, {3, 4}}));
  EXPECT_EQ(p.block_of(4), 2u);
}

TEST(Sigma, PartitionRejectsOverlapAndGaps) {
  const FiniteSpace w(3);
  EXPECT_THROW(Partition(w, {{0, 1}, {1, 2}}), InputError);
  EXPECT_THROW(Partition(w, {{0, 1}}), InputError);
  EXPECT_THROW(Partition(w, {{0, 1, 2}, {}}), InputError);
  EXPECT_THROW(Partition(w, {{0, 1, 5}}), InputError);
}

TEST(Sigma, FiniteSpaceRejectsEmpty) { EXPECT_THROW(FiniteSpace(0), InputError); }

TEST(Sigma, Measurability) {
  const FiniteSpace w(4);
  const Partition h1(w, {{0, 1}, {2, 3}});
  EXPECT_TRUE(is_measurable(FiniteRV(w, {1, 1, 2, 2}), h1));
  EXPECT_FALSE(is_measurable(FiniteRV(w, {0, 1, 2, 3}), h1));
  const auto wit = measurability_witness(FiniteRV(w, {0, 1, 2, 3}), h1);
  ASSERT_TRUE(wit);
  EXPECT_EQ(*wit, std::make_pair(std::size_t{0}, std::size_t{1}));
}

TEST(Sigma, CanonicalYEncodesBlocks) {
  const FiniteSpace w(4);
  const Partition p(w, {{0, 3}, {1}, {2}});
  const FiniteRV y = canonical_y(p);
  EXPECT_EQ(y.values, (std::vector<double>{0.0, 1.0 / 3, 2.0 / 3, 0.0}));
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_EQ(decode_canonical_y(y(i), p.block_count()), p.block_of(i));
  EXPECT_TRUE(is_measurable(y, p));
}

TEST(Sigma, FactorizeGrid) {
  const FiniteSpace w(4);
  const std::vector<Partition> parts{Partition(w, {{0, 1}, {2, 3}}),
                                     Partition(w, {{0, 2}, {1, 3}})};
  const std::vector<FiniteRV> xs{FiniteRV(w, {0, 1, 2, 3})};
  const std::vector<IndexSet> deps{{0, 1}};
  const Factorization f = factorize(xs, parts, deps);
  ASSERT_EQ(f.tables.size(), 1u);
  for (std::size_t b1 = 0; b1 < 2; ++b1)
    for (std::size_t b2 = 0; b2 < 2; ++b2) {
      const std::vector<std::size_t> key{b1, b2};
      EXPECT_EQ(f.tables[0](key), static_cast<double>(2 * b1 + b2));
    }
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(f.evaluate(0, i), xs[0](i));
}

TEST(Sigma, FactorizeConstant) {
  const FiniteSpace w(3);
  const std::vector<Partition> parts{Partition(w, {{0, 1}, {2}})};
  const std::vector<FiniteRV> xs{FiniteRV(w, {7.5, 7.5, 7.5})};
  for (const IndexSet& d : {IndexSet{}, IndexSet{0}}) {
    const std::vector<IndexSet> deps{d};
    const Factorization f = factorize(xs, parts, deps);
    for (const auto& [key, value] : f.tables[0].table) EXPECT_EQ(value, 7.5);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(f.evaluate(0, i), 7.5);
  }
}

TEST(Sigma, FactorizeOneVariable) {
  const FiniteSpace w(4);
  const std::vector<Partition> parts{Partition(w, {{0, 1}, {2, 3}})};
  const std::vector<FiniteRV> xs{FiniteRV(w, {1, 1, 2, 2})};
  const std::vector<IndexSet> deps{{0}};
  const Factorization f = factorize(xs, parts, deps);
  EXPECT_EQ(f.tables[0].table.size(), 2u);
  EXPECT_EQ(f.tables[0](std::vector<std::size_t>{0}), 1.0);
  EXPECT_EQ(f.tables[0](std::vector<std::size_t>{1}), 2.0);
}

TEST(Sigma, FactorizeReportsWitness) {
  const FiniteSpace w(4);
  const std::vector<Partition> parts{Partition(w, {{0, 1}, {2, 3}}),
                                     Partition(w, {{0, 2}, {1, 3}})};
  const std::vector<FiniteRV> xs{FiniteRV(w, {1, 1, 2, 2}), FiniteRV(w, {0, 1, 2, 3})};
  const std::vector<IndexSet> deps{{0}, {1}};
  try {
    factorize(xs, parts, deps);
    FAIL() << "expected MeasurabilityError";
  } catch (const MeasurabilityError& e) {
    EXPECT_EQ(e.rv_index(), 1u);
    const auto [p, q] = e.witness();
    EXPECT_EQ(parts[1].block_of(p), parts[1].block_of(q));
    EXPECT_NE(xs[1](p), xs[1](q));
  }
}

TEST(Sigma, FactorizeRejectsBadDeps) {
  const FiniteSpace w(2);
  const std::vector<Partition> parts{Partition::singletons(w)};
  const std::vector<FiniteRV> xs{FiniteRV(w, {0, 1})};
  const std::vector<IndexSet> deps{{3}};
  EXPECT_THROW(factorize(xs, parts, deps), InputError);
  EXPECT_THROW(factorize(xs, parts, std::vector<IndexSet>{}), InputError);
}

// Random instances shared by the property tests below.
struct Instance {
  FiniteSpace w{1};
  std::vector<Partition> parts;
  std::vector<FiniteRV> xs;
  std::vector<IndexSet> deps;
};

Partition random_partition(const FiniteSpace& w, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> label(0, w.size - 1);
  std::size_t blocks = std::uniform_int_distribution<std::size_t>(1, w.size)(rng);
  std::vector<IndexSet> out(blocks);
  for (std::size_t i = 0; i < w.size; ++i) out[label(rng) % blocks].push_back(i);
  std::erase_if(out, [](const IndexSet& b) { return b.empty(); });
  return Partition(w, std::move(out));
}

Instance random_instance(std::mt19937_64& rng) {
  Instance in;
  in.w = FiniteSpace(std::uniform_int_distribution<std::size_t>(1, 12)(rng));
  const std::size_t np = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
  for (std::size_t j = 0; j < np; ++j) in.parts.push_back(random_partition(in.w, rng));
  const std::size_t nx = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
  for (std::size_t k = 0; k < nx; ++k) {
    IndexSet d;
    for (std::size_t j = 0; j < np; ++j)
      if (rng() & 1) d.push_back(j);
    in.deps.push_back(d);
    // Half the time build x from the join so the instance is measurable.
    std::vector<double> values(in.w.size);
    if (rng() & 1) {
      std::vector<Partition> sub;
      for (std::size_t j : d) sub.push_back(in.parts[j]);
      if (sub.empty()) sub.push_back(Partition::trivial(in.w));
      const Partition p = join(sub);
      std::vector<double> per_block(p.block_count());
      for (double& v : per_block) v = static_cast<double>(rng() % 5);
      for (std::size_t i = 0; i < in.w.size; ++i) values[i] = per_block[p.block_of(i)];
    } else {
      for (double& v : values) v = static_cast<double>(rng() % 3);
    }
    in.xs.emplace_back(in.w, values);
  }
  return in;
}

// Measurable iff x is constant on each class of points with identical block
// signatures across the dependencies.
bool brute_force_measurable(const Instance& in, std::size_t k) {
  for (std::size_t a = 0; a < in.w.size; ++a)
    for (std::size_t b = 0; b < in.w.size; ++b) {
      bool same = true;
      for (std::size_t j : in.deps[k])
        same = same && in.parts[j].block_of(a) == in.parts[j].block_of(b);
      if (same && in.xs[k](a) != in.xs[k](b)) return false;
    }
  return true;
}

TEST(SigmaProperty, FactorizeMatchesBruteForce) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const Instance in = random_instance(rng);
    bool expected = true;
    for (std::size_t k = 0; k < in.xs.size(); ++k)
      expected = expected && brute_force_measurable(in, k);
    try {
      const Factorization f = factorize(in.xs, in.parts, in.deps);
      EXPECT_TRUE(expected);
      for (std::size_t k = 0; k < in.xs.size(); ++k)
        for (std::size_t i = 0; i < in.w.size; ++i) EXPECT_EQ(f.evaluate(k, i), in.xs[k](i));
      for (std::size_t j = 0; j < in.parts.size(); ++j)
        EXPECT_EQ(f.ys[j].values, canonical_y(in.parts[j]).values);
    } catch (const MeasurabilityError&) {
      EXPECT_FALSE(expected);
    }
  }
}

TEST(SigmaProperty, JoinAlgebra) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const FiniteSpace w(std::uniform_int_distribution<std::size_t>(1, 10)(rng));
    const Partition p = random_partition(w, rng);
    const Partition q = random_partition(w, rng);
    const std::vector<Partition> pq{p, q}, qp{q, p}, pp{p, p};
    EXPECT_EQ(join(pq), join(qp));
    EXPECT_EQ(join(pp), p);
    EXPECT_TRUE(join(pq).refines(p));
    EXPECT_TRUE(join(pq).refines(q));
    EXPECT_TRUE(p.refines(Partition::trivial(w)));
    EXPECT_TRUE(Partition::singletons(w).refines(p));
  }
}

TEST(SigmaProperty, GenerateIdempotent) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const FiniteSpace w(std::uniform_int_distribution<std::size_t>(1, 10)(rng));
    std::vector<IndexSet> sets(rng() % 4);
    for (auto& s : sets)
      for (std::size_t i = 0; i < w.size; ++i)
        if (rng() & 1) s.push_back(i);
    std::vector<IndexSet> doubled = sets;
    doubled.insert(doubled.end(), sets.begin(), sets.end());
    const Partition g = generate(w, sets);
    EXPECT_EQ(generate(w, doubled), g);
    // Every generating set is a union of atoms.
    for (const auto& s : sets) {
      const std::set<std::size_t> in(s.begin(), s.end());
      for (const auto& b : g.blocks()) {
        std::size_t hits = 0;
        for (std::size_t i : b) hits += in.count(i);
        EXPECT_TRUE(hits == 0 || hits == b.size());
      }
    }
  }
}

TEST(SigmaProperty, SharedYAcrossOverlappingDeps) {
  const FiniteSpace w(6);
  const std::vector<Partition> parts{Partition(w, {{0, 1, 2}, {3, 4, 5}}),
                                     Partition(w, {{0, 3}, {1, 4}, {2, 5}})};
  const std::vector<FiniteRV> xs{FiniteRV(w, {0, 0, 0, 1, 1, 1}),
                                 FiniteRV(w, {0, 1, 2, 3, 4, 5}),
                                 FiniteRV(w, {5, 6, 7, 5, 6, 7})};
  const std::vector<IndexSet> deps{{0}, {1, 0}, {1}};
  const Factorization f = factorize(xs, parts, deps);
  ASSERT_EQ(f.ys.size(), 2u);
  EXPECT_EQ(f.tables[1].inputs, (std::vector<std::size_t>{0, 1}));
  for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(f.ys[j].values, canonical_y(parts[j]).values);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(f.evaluate(k, i), xs[k](i));
}

}  // namespace
}  // namespace oppsched::sigma
