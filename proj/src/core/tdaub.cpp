#include "tdaub.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

namespace tsforge::tdaub {

namespace {

void emit(const ProgressSink& sink, std::mutex* m, ProgressEvent ev) {
  if (!sink) return;
  if (m) {
    std::lock_guard<std::mutex> lock(*m);
    sink(ev);
  } else {
    sink(ev);
  }
}

bool is_suffix_of(const TimeSeriesFrame& slice, const TimeSeriesFrame& t1) {
  if (slice.rows() > t1.rows() || slice.cols() != t1.cols()) return false;
  const std::size_t off = t1.rows() - slice.rows();
  const bool check_time = slice.has_timestamps() && t1.has_timestamps();
  for (std::size_t r = 0; r < slice.rows(); ++r) {
    if (check_time && slice.time_at(r) != t1.time_at(off + r)) return false;
    for (std::size_t c = 0; c < slice.cols(); ++c) {
      if (slice.value(r, c) != t1.value(off + r, c)) return false;
    }
  }
  return true;
}

// Trains a fresh clone on the last `allocation` rows of T1 and scores it on
// T2. Also checks, rather than trusts, that the slice really is a suffix.
ScoreEntry run_allocation(const Pipeline& prototype, const TimeSeriesFrame& t1,
                          const TimeSeriesFrame& t2, std::size_t allocation, std::size_t horizon,
                          std::atomic<std::size_t>& violations) {
  ScoreEntry entry;
  entry.allocation = allocation;
  const TimeSeriesFrame slice = t1.suffix(std::min(allocation, t1.rows()));
  if (!is_suffix_of(slice, t1)) ++violations;
  auto p = prototype.clone_unfitted();
  entry.score = fit_predict_score(*p, slice, t2, horizon);
  entry.failed = p->failed();
  entry.train_seconds = p->train_seconds();
  entry.score_seconds = p->score_seconds();
  return entry;
}

// Indices sorted by extrapolated score ascending, catalog order on ties.
std::vector<std::size_t> rank_board(const std::vector<PipelineBoard>& boards) {
  std::vector<std::size_t> idx(boards.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return boards[a].extrapolated < boards[b].extrapolated;
  });
  return idx;
}

void append_entry(PipelineBoard& board, const ScoreEntry& entry, std::size_t l_cap) {
  if (!board.history.empty() && entry.allocation <= board.history.back().allocation) {
    throw TsError("tdaub: allocation not increasing for " + board.name);
  }
  board.history.push_back(entry);
  board.extrapolated = extrapolate(board.history, l_cap);
}

}  // namespace

void TDaubConfig::validate() const {
  if (min_allocation_size == 0) throw TsError("tdaub: min_allocation_size must be positive");
  if (allocation_size == 0) throw TsError("tdaub: allocation_size must be positive");
  if (cutoff() < min_allocation_size) {
    throw TsError("tdaub: fixed_allocation_cutoff below min_allocation_size");
  }
  if (!(geo_increment_size > 1.0)) throw TsError("tdaub: geo_increment_size must exceed 1");
  if (run_to_completion == 0) throw TsError("tdaub: run_to_completion must be positive");
  if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
    throw TsError("tdaub: test_fraction must lie in (0, 1)");
  }
  if (horizon == 0) throw TsError("tdaub: horizon must be positive");
}

std::vector<std::size_t> plan_fixed_allocations(const TDaubConfig& cfg, std::size_t L) {
  cfg.validate();
  const std::size_t num_fix_runs = cfg.cutoff() / cfg.min_allocation_size;
  std::vector<std::size_t> plan;
  for (std::size_t i = 1; i <= num_fix_runs; ++i) {
    const std::size_t a = std::min(cfg.min_allocation_size * i, L);
    if (plan.empty() || plan.back() != a) plan.push_back(a);
  }
  return plan;
}

std::size_t next_allocation(std::size_t last_allocation_size, const TDaubConfig& cfg) {
  const double scaled = static_cast<double>(last_allocation_size) * cfg.geo_increment_size /
                        static_cast<double>(cfg.allocation_size);
  return static_cast<std::size_t>(scaled) * cfg.allocation_size;
}

double extrapolate(const std::vector<ScoreEntry>& history, std::size_t L) {
  if (history.empty()) return kSentinelScore;
  if (history.size() < 2) return history.back().score;
  double mx = 0.0, my = 0.0;
  for (const auto& e : history) {
    mx += static_cast<double>(e.allocation);
    my += e.score;
  }
  const double n = static_cast<double>(history.size());
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& e : history) {
    const double dx = static_cast<double>(e.allocation) - mx;
    sxx += dx * dx;
    sxy += dx * (e.score - my);
  }
  if (sxx <= 0.0) return history.back().score;
  const double slope = sxy / sxx;
  const double value = my + slope * (static_cast<double>(L) - mx);
  return std::clamp(value, 0.0, 200.0);
}

SelectionResult select(const std::vector<std::unique_ptr<Pipeline>>& pipelines,
                       const TimeSeriesFrame& train, const TDaubConfig& cfg,
                       const ProgressSink& sink) {
  cfg.validate();
  if (pipelines.empty()) throw TsError("tdaub: empty pipeline list");

  const TemporalSplit split = temporal_split(train, 1.0 - cfg.test_fraction);
  const TimeSeriesFrame& t1 = split.train;
  const TimeSeriesFrame& t2 = split.holdout;
  const std::size_t L = t1.rows();
  const std::size_t np = pipelines.size();

  SelectionResult result;
  Scoreboard& board = result.board;
  board.L = L;
  board.pipelines.resize(np);
  for (std::size_t j = 0; j < np; ++j) board.pipelines[j].name = pipelines[j]->name();

  std::atomic<std::size_t> violations{0};
  std::mutex sink_mutex;

  if (L <= cfg.min_allocation_size) {
    // Too little data for the ladder: every pipeline gets the full T1.
    board.bypassed = true;
    for (std::size_t j = 0; j < np; ++j) {
      ScoreEntry e = run_allocation(*pipelines[j], t1, t2, L, cfg.horizon, violations);
      board.rows_trained += e.allocation;
      append_entry(board.pipelines[j], e, L);
      board.pipelines[j].final_score = e.score;
      emit(sink, nullptr,
           {"bypass", board.pipelines[j].name, e.allocation, e.score, e.train_seconds});
    }
    board.ranking = rank_board(board.pipelines);
    result.final_ranking = board.ranking;
  } else {
    const std::vector<std::size_t> plan = plan_fixed_allocations(cfg, L);

    // Fixed allocation part. Every (allocation, pipeline) cell is
    // independent; clones carry their own state so workers never share a
    // pipeline. Results land in preassigned slots, which keeps the outcome
    // identical for any worker count.
    struct Task {
      std::size_t alloc_index, pipe_index;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < plan.size(); ++i) {
      for (std::size_t j = 0; j < np; ++j) tasks.push_back({i, j});
    }
    std::vector<ScoreEntry> cells(tasks.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.jobs, tasks.size()));
    std::atomic<std::size_t> cursor{0};
    auto work = [&] {
      for (;;) {
        const std::size_t k = cursor.fetch_add(1);
        if (k >= tasks.size()) return;
        const Task& t = tasks[k];
        cells[k] =
            run_allocation(*pipelines[t.pipe_index], t1, t2, plan[t.alloc_index], cfg.horizon,
                           violations);
        emit(sink, &sink_mutex,
             {"fixed", pipelines[t.pipe_index]->name(), cells[k].allocation, cells[k].score,
              cells[k].train_seconds});
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      append_entry(board.pipelines[tasks[k].pipe_index], cells[k], L);
      board.rows_trained += cells[k].allocation;
    }
    board.ranking = rank_board(board.pipelines);

    // Allocation acceleration part. l is read as the size of the most
    // recent slice: it starts where the fixed ladder ended and grows
    // geometrically toward L. The current leader gets each extra allocation
    // and the ranking is refreshed after every run; once the size passes L
    // the phase is over (full-T1 runs belong to the scoring step).
    const std::size_t largest_fixed = plan.back();
    long long l = static_cast<long long>(largest_fixed);
    l += static_cast<long long>(next_allocation(largest_fixed, cfg));
    if (l < static_cast<long long>(largest_fixed)) l = static_cast<long long>(largest_fixed);
    while (l < static_cast<long long>(L)) {
      const std::size_t a = static_cast<std::size_t>(l);
      const std::size_t top = board.ranking.front();
      PipelineBoard& tb = board.pipelines[top];
      if (tb.history.empty() || tb.history.back().allocation < a) {
        ScoreEntry e = run_allocation(*pipelines[top], t1, t2, a, cfg.horizon, violations);
        board.rows_trained += e.allocation;
        append_entry(tb, e, L);
        board.ranking = rank_board(board.pipelines);
        emit(sink, nullptr, {"acceleration", tb.name, a, e.score, e.train_seconds});
      }
      std::size_t step = next_allocation(a, cfg);
      if (step == 0) step = cfg.allocation_size;
      l += static_cast<long long>(step);
    }

    // T-Daub scoring: the top run_to_completion pipelines earn a full-T1
    // run. After that, any pipeline whose extrapolation still claims to
    // beat the best verified score gets a full run too, so an optimistic
    // line fit cannot outrank a real measurement it never had to face.
    // Verified pipelines are ranked by their real scores, the rest follow
    // in extrapolated order.
    auto run_full = [&](std::size_t j) {
      PipelineBoard& pb = board.pipelines[j];
      if (!pb.history.empty() && pb.history.back().allocation == L) {
        pb.final_score = pb.history.back().score;
        return;
      }
      ScoreEntry e = run_allocation(*pipelines[j], t1, t2, L, cfg.horizon, violations);
      board.rows_trained += e.allocation;
      append_entry(pb, e, L);
      pb.final_score = e.score;
      emit(sink, nullptr, {"scoring", pb.name, L, e.score, e.train_seconds});
    };
    const std::size_t completed = std::min(cfg.run_to_completion, np);
    for (std::size_t k = 0; k < completed; ++k) run_full(board.ranking[k]);
    for (;;) {
      double best_real = kSentinelScore + 1.0;
      for (const auto& pb : board.pipelines) {
        if (pb.final_score) best_real = std::min(best_real, *pb.final_score);
      }
      std::size_t challenger = np;
      for (std::size_t j : board.ranking) {
        if (!board.pipelines[j].final_score && board.pipelines[j].extrapolated < best_real) {
          challenger = j;
          break;
        }
      }
      if (challenger == np) break;
      run_full(challenger);
    }
    std::vector<std::size_t> verified;
    for (std::size_t j = 0; j < np; ++j) {
      if (board.pipelines[j].final_score) verified.push_back(j);
    }
    std::stable_sort(verified.begin(), verified.end(), [&](std::size_t a, std::size_t b) {
      if (*board.pipelines[a].final_score != *board.pipelines[b].final_score) {
        return *board.pipelines[a].final_score < *board.pipelines[b].final_score;
      }
      return a < b;
    });
    result.final_ranking = verified;
    for (std::size_t j : board.ranking) {
      if (!board.pipelines[j].final_score) result.final_ranking.push_back(j);
    }
  }

  board.suffix_violations = violations.load();

  bool any_viable = false;
  for (const auto& pb : board.pipelines) {
    for (const auto& e : pb.history) {
      if (!e.failed && e.score < kSentinelScore) any_viable = true;
    }
  }
  if (!any_viable) throw TsError("tdaub: no viable pipeline");

  // Retrain the winner on the entire training frame. Should the winner's
  // full fit break, fall through the ranking until one trains.
  std::string last_error = "no viable pipeline";
  for (std::size_t j : result.final_ranking) {
    auto candidate = pipelines[j]->clone_unfitted();
    try {
      candidate->fit(train, cfg.horizon);
    } catch (const std::exception& e) {
      last_error = e.what();
      continue;
    }
    result.winner = std::move(candidate);
    result.winner_index = j;
    const auto& pb = board.pipelines[j];
    result.winner_t2_score = pb.final_score ? *pb.final_score : pb.extrapolated;
    emit(sink, nullptr,
         {"retrain", result.winner->name(), train.rows(), result.winner_t2_score,
          result.winner->train_seconds()});
    return result;
  }
  throw TsError(std::string("tdaub: winner retrain failed: ") + last_error);
}

}  // namespace tsforge::tdaub
