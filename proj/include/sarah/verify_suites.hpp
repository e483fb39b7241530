#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sarah/oracle.hpp"
#include "sarah/problem.hpp"

namespace sarah {

// One enumerable instance of the default test matrix.
struct TinyInstance {
  std::string id;  // e.g. "ridge/n3"
  Problem problem;
  DenseVector w0;
};

// Problems with n in {1,2,3}, d = 2, for each of the three kinds, started at (1.5, -2).
std::vector<TinyInstance> tiny_problems();

// Batch sizes {1, 2, n} restricted to b <= n, without repeats.
std::vector<std::size_t> matrix_batches(std::size_t n);

struct VerifyOptions {
  std::uint64_t budget = kDefaultPathBudget;
  std::size_t jobs = 1;
  // Include the Monte-Carlo instances at n = 100.
  bool monte_carlo = true;
};

const std::vector<std::string>& suite_names();
bool is_known_suite(std::string_view name);

// Runs one suite ("all" runs every suite). Each report is passed to on_report
// as soon as it is produced. Instances whose enumeration exceeds the budget
// are reported as SKIP. Throws ConfigError for an unknown suite.
std::vector<CheckReport> run_suite(std::string_view name, const VerifyOptions& options,
                                   const std::function<void(const CheckReport&)>& on_report = {});

}  // namespace sarah
