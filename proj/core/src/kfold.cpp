#include "surropt/kfold.hpp"

#include <numeric>
#include <string>
#include <utility>

#include "surropt/errors.hpp"
#include "surropt/rng.hpp"

namespace surropt {

std::vector<std::size_t> kfold_split(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw InputError("k-fold split needs at least 2 folds");
  if (n < folds) {
    throw InputError("k-fold split of " + std::to_string(n) + " rows into " + std::to_string(folds) +
                     " folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::size_t> fold(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold[order[pos]] = pos % folds;
  return fold;
}

FoldRows fold_rows(const std::vector<std::size_t>& assignment, std::size_t fold) {
  FoldRows out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    (assignment[i] == fold ? out.validation : out.train).push_back(i);
  }
  return out;
}

}  // namespace surropt
