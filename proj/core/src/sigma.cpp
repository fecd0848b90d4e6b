#include "oppsched/sigma.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oppsched/error.hpp"

namespace oppsched::sigma {

namespace {

// Groups points by an arbitrary signature. Blocks come out ordered by their
// first (minimum) point because points are visited in increasing order.
template <typename Signature>
Partition group_by(FiniteSpace space, const std::vector<Signature>& sigs) {
  std::map<Signature, std::size_t> index;
  std::vector<IndexSet> blocks;
  for (std::size_t w = 0; w < space.size; ++w) {
    auto [it, inserted] = index.try_emplace(sigs[w], blocks.size());
    if (inserted) blocks.emplace_back();
    blocks[it->second].push_back(w);
  }
  return Partition(space, std::move(blocks));
}

}  // namespace

FiniteSpace::FiniteSpace(std::size_t n) : size(n) {
  if (n == 0) throw InputError("finite space must have at least one point");
}

Partition::Partition(FiniteSpace space, std::vector<IndexSet> blocks)
    : space_(space), blocks_(std::move(blocks)), block_of_(space.size) {
  std::vector<bool> seen(space_.size, false);
  for (auto& block : blocks_) {
    if (block.empty()) throw InputError("partition block is empty");
    std::sort(block.begin(), block.end());
    for (std::size_t w : block) {
      if (w >= space_.size)
        throw InputError("partition index " + std::to_string(w) +
                         " out of range for n=" + std::to_string(space_.size));
      if (seen[w])
        throw InputError("point " + std::to_string(w) +
                         " appears in two partition blocks");
      seen[w] = true;
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw InputError("partition blocks do not cover the space");
  std::sort(blocks_.begin(), blocks_.end(),
            [](const IndexSet& a, const IndexSet& b) { return a[0] < b[0]; });
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (std::size_t w : blocks_[b]) block_of_[w] = b;
}

Partition Partition::trivial(FiniteSpace space) {
  IndexSet all(space.size);
  for (std::size_t w = 0; w < space.size; ++w) all[w] = w;
  return Partition(space, {std::move(all)});
}

Partition Partition::singletons(FiniteSpace space) {
  std::vector<IndexSet> blocks(space.size);
  for (std::size_t w = 0; w < space.size; ++w) blocks[w] = {w};
  return Partition(space, std::move(blocks));
}

bool Partition::refines(const Partition& coarser) const {
  if (!(space_ == coarser.space_)) return false;
  for (const auto& block : blocks_) {
    const std::size_t target = coarser.block_of(block[0]);
    for (std::size_t w : block)
      if (coarser.block_of(w) != target) return false;
  }
  return true;
}

FiniteRV::FiniteRV(FiniteSpace space_, std::vector<double> values_)
    : space(space_), values(std::move(values_)) {
  if (values.size() != space.size)
    throw InputError("random variable has " + std::to_string(values.size()) +
                     " values on a space of size " +
                     std::to_string(space.size));
}

Partition generate(FiniteSpace space, std::span<const IndexSet> sets) {
  std::vector<std::vector<bool>> sigs(space.size,
                                      std::vector<bool>(sets.size(), false));
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t w : sets[i]) {
      if (w >= space.size)
        throw InputError("generating set " + std::to_string(i) +
                         " contains out-of-range index " + std::to_string(w));
      sigs[w][i] = true;
    }
  }
  return group_by(space, sigs);
}

Partition join(std::span<const Partition> parts) {
  if (parts.empty()) throw InputError("join of an empty partition list");
  const FiniteSpace space = parts[0].space();
  for (const auto& p : parts)
    if (!(p.space() == space))
      throw InputError("join of partitions on different spaces");
  std::vector<std::vector<std::size_t>> sigs(space.size);
  for (std::size_t w = 0; w < space.size; ++w) {
    sigs[w].reserve(parts.size());
    for (const auto& p : parts) sigs[w].push_back(p.block_of(w));
  }
  return group_by(space, sigs);
}

std::optional<std::pair<std::size_t, std::size_t>> measurability_witness(
    const FiniteRV& x, const Partition& p) {
  if (!(x.space == p.space()))
    throw InputError("random variable and partition live on different spaces");
  for (const auto& block : p.blocks()) {
    for (std::size_t w : block)
      if (x(w) != x(block[0])) return std::pair{block[0], w};
  }
  return std::nullopt;
}

bool is_measurable(const FiniteRV& x, const Partition& p) {
  return !measurability_witness(x, p).has_value();
}

FiniteRV canonical_y(const Partition& p) {
  const double denom = static_cast<double>(std::max<std::size_t>(1, p.block_count()));
  std::vector<double> values(p.space().size);
  for (std::size_t w = 0; w < values.size(); ++w)
    values[w] = static_cast<double>(p.block_of(w)) / denom;
  return FiniteRV(p.space(), std::move(values));
}

std::size_t decode_canonical_y(double y, std::size_t block_count) {
  const double denom = static_cast<double>(std::max<std::size_t>(1, block_count));
  return static_cast<std::size_t>(std::llround(y * denom));
}

double FactorTable::operator()(std::span<const std::size_t> blocks) const {
  auto it = table.find(std::vector<std::size_t>(blocks.begin(), blocks.end()));
  if (it == table.end()) throw InputError("block tuple not in factor table");
  return it->second;
}

double Factorization::evaluate(std::size_t k, std::size_t point) const {
  const FactorTable& h = tables.at(k);
  std::vector<std::size_t> key;
  key.reserve(h.inputs.size());
  for (std::size_t j : h.inputs)
    key.push_back(decode_canonical_y(ys[j](point), counts[j]));
  return h(key);
}

MeasurabilityError::MeasurabilityError(std::size_t k, std::size_t first,
                                       std::size_t second)
    : std::runtime_error("random variable " + std::to_string(k) +
                         " is not measurable w.r.t. the join of its "
                         "dependencies: points " +
                         std::to_string(first) + " and " +
                         std::to_string(second) +
                         " share an atom but take different values"),
      k_(k),
      first_(first),
      second_(second) {}

Factorization factorize(std::span<const FiniteRV> xs,
                        std::span<const Partition> parts,
                        std::span<const IndexSet> deps) {
  if (xs.size() != deps.size())
    throw InputError("factorize needs one dependency set per random variable");
  if (parts.empty()) throw InputError("factorize needs at least one partition");
  const FiniteSpace space = parts[0].space();
  for (const auto& p : parts)
    if (!(p.space() == space))
      throw InputError("partitions live on different spaces");
  for (const auto& x : xs)
    if (!(x.space == space))
      throw InputError("random variable lives on a different space");

  Factorization out;
  out.ys.reserve(parts.size());
  for (const auto& p : parts) {
    out.ys.push_back(canonical_y(p));
    out.counts.push_back(p.block_count());
  }

  for (std::size_t k = 0; k < xs.size(); ++k) {
    FactorTable h;
    h.inputs = deps[k];
    std::sort(h.inputs.begin(), h.inputs.end());
    h.inputs.erase(std::unique(h.inputs.begin(), h.inputs.end()),
                   h.inputs.end());
    for (std::size_t j : h.inputs)
      if (j >= parts.size())
        throw InputError("dependency index " + std::to_string(j) +
                         " out of range");

    // A block tuple is an atom of the join over J_k; copying x_k's value on
    // the first point of each atom defines h_k, and any disagreement later in
    // the same atom is a measurability counterexample.
    std::map<std::vector<std::size_t>, std::size_t> first_point;
    for (std::size_t w = 0; w < space.size; ++w) {
      std::vector<std::size_t> key;
      key.reserve(h.inputs.size());
      for (std::size_t j : h.inputs) key.push_back(parts[j].block_of(w));
      auto [it, inserted] = first_point.try_emplace(key, w);
      if (inserted) {
        h.table.emplace(std::move(key), xs[k](w));
      } else if (xs[k](it->second) != xs[k](w)) {
        throw MeasurabilityError(k, it->second, w);
      }
    }
    out.tables.push_back(std::move(h));
  }
  return out;
}

}  // namespace oppsched::sigma
