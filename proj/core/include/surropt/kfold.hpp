#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace surropt {

/// Fold index of every row. Rows are shuffled with a seeded Fisher-Yates pass
/// and dealt round-robin, so fold sizes differ by at most one.
/// Throws InputError when n < folds or folds < 2.
std::vector<std::size_t> kfold_split(std::size_t n, std::size_t folds, std::uint64_t seed);

struct FoldRows {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Ascending row lists for one fold.
FoldRows fold_rows(const std::vector<std::size_t>& assignment, std::size_t fold);

}  // namespace surropt
