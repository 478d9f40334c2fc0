#pragma once

#include <exception>
#include <span>
#include <thread>
#include <vector>

#include "srbmpc/qp.hpp"

namespace srbmpc {

inline unsigned default_batch_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Data-parallel solve of structurally identical problems. Each worker owns
/// one solver, so the symbolic KKT factorization is computed once per worker
/// and reused for its whole share. Results are independent of the thread
/// count: problem i always goes through the same arithmetic as solve(problems[i]).
inline std::vector<QpSolution> solve_batch(std::span<const QpProblem> problems,
                                           const SolverSettings& settings = {},
                                           unsigned num_threads = 0) {
  std::vector<QpSolution> out(problems.size());
  if (problems.empty()) return out;
  for (size_t i = 1; i < problems.size(); ++i) {
    if (!problems[0].same_structure(problems[i])) {
      throw std::invalid_argument("solve_batch: heterogeneous problem structure at index " +
                                  std::to_string(i));
    }
  }

  unsigned threads = num_threads > 0 ? num_threads : default_batch_threads();
  threads = std::min<unsigned>(threads, unsigned(problems.size()));

  if (threads <= 1) {
    IpmSolver solver(settings);
    for (size_t i = 0; i < problems.size(); ++i) out[i] = solver.solve(problems[i]);
    return out;
  }

  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const size_t total = problems.size();
  for (unsigned t = 0; t < threads; ++t) {
    const size_t begin = total * t / threads;
    const size_t end = total * (t + 1) / threads;
    pool.emplace_back([&, begin, end, t] {
      try {
        IpmSolver solver(settings);
        for (size_t i = begin; i < end; ++i) out[i] = solver.solve(problems[i]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

inline std::vector<QpSolution> solve_batch(const std::vector<QpProblem>& problems,
                                           const SolverSettings& settings = {},
                                           unsigned num_threads = 0) {
  return solve_batch(std::span<const QpProblem>(problems.data(), problems.size()), settings,
                     num_threads);
}

}  // namespace srbmpc
