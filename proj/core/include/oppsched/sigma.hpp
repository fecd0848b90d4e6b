#pragma once

// Sigma algebras on finite sample spaces, represented by their atoms.
//
// On a finite space every sigma algebra is the collection of unions of the
// blocks of a unique partition, so generation, joins, and measurability all
// reduce to partition operations. factorize() builds the explicit functions
// h_k with X_k = h_k((Y_j)_{j in J_k}) over one shared family (Y_j).

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace oppsched::sigma {

using IndexSet = std::vector<std::size_t>;

struct FiniteSpace {
  std::size_t size = 1;

  explicit FiniteSpace(std::size_t n);
  friend bool operator==(const FiniteSpace&, const FiniteSpace&) = default;
};

class Partition {
 public:
  // Validates disjointness and coverage, then canonicalizes: each block
  // sorted, blocks ordered by their minimum element.
  Partition(FiniteSpace space, std::vector<IndexSet> blocks);

  static Partition trivial(FiniteSpace space);
  static Partition singletons(FiniteSpace space);

  const FiniteSpace& space() const noexcept { return space_; }
  const std::vector<IndexSet>& blocks() const noexcept { return blocks_; }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  std::size_t block_of(std::size_t point) const { return block_of_.at(point); }

  // True iff every block of *this is contained in a block of coarser.
  bool refines(const Partition& coarser) const;

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.space_ == b.space_ && a.blocks_ == b.blocks_;
  }

 private:
  FiniteSpace space_;
  std::vector<IndexSet> blocks_;
  std::vector<std::size_t> block_of_;
};

struct FiniteRV {
  FiniteSpace space;
  std::vector<double> values;

  FiniteRV(FiniteSpace space, std::vector<double> values);
  double operator()(std::size_t point) const { return values.at(point); }
};

// Atoms of sigma(sets): two points share a block iff they agree on
// membership in every generating set.
Partition generate(FiniteSpace space, std::span<const IndexSet> sets);

// Common refinement: the atoms of sigma(union of the inputs). An empty
// list is rejected because the space would be unknown.
Partition join(std::span<const Partition> parts);

bool is_measurable(const FiniteRV& x, const Partition& p);

// If x is not p-measurable, a pair of points in one block where x differs.
std::optional<std::pair<std::size_t, std::size_t>> measurability_witness(
    const FiniteRV& x, const Partition& p);

// Y(w) = (block index of w) / max(1, #blocks). Values lie in [0,1), are
// p-measurable, and separate the blocks.
FiniteRV canonical_y(const Partition& p);

// Recovers the block index from a canonical_y value. Exact because the
// encoding is b / n with n small.
std::size_t decode_canonical_y(double y, std::size_t block_count);

struct FactorTable {
  std::vector<std::size_t> inputs;  // partition indices j in J_k, ascending
  std::map<std::vector<std::size_t>, double> table;  // block tuple -> value

  // h_k applied to block indices, one per input in `inputs` order.
  double operator()(std::span<const std::size_t> blocks) const;
};

struct Factorization {
  std::vector<FiniteRV> ys;         // ys[j] == canonical_y(parts[j])
  std::vector<std::size_t> counts;  // block count of each parts[j]
  std::vector<FactorTable> tables;  // one per x_k

  // Evaluates h_k((Y_j(w))_{j in J_k}) by decoding the shared Y values.
  double evaluate(std::size_t k, std::size_t point) const;
};

class MeasurabilityError : public std::runtime_error {
 public:
  MeasurabilityError(std::size_t k, std::size_t first, std::size_t second);

  std::size_t rv_index() const noexcept { return k_; }
  std::pair<std::size_t, std::size_t> witness() const noexcept {
    return {first_, second_};
  }

 private:
  std::size_t k_, first_, second_;
};

// Throws MeasurabilityError when some x_k is not measurable with respect to
// the join of {parts[j] : j in deps[k]}; InputError on shape mismatches.
Factorization factorize(std::span<const FiniteRV> xs,
                        std::span<const Partition> parts,
                        std::span<const IndexSet> deps);

}  // namespace oppsched::sigma
