#include "aitk/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace aitk::sweep {

int worker_count() {
  if (const char* env = std::getenv("AI_TOOLKIT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int count, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<WordRun> run_words(const StructuralParams& p, double sigma,
                               double delta,
                               const std::vector<SymbolSequence>& ws,
                               const BranchOptions& opts) {
  std::vector<std::optional<WordRun>> slots(ws.size());
  parallel_for(static_cast<int>(ws.size()), [&](int i) {
    const SymbolSequence& w = ws[static_cast<std::size_t>(i)];
    const ResidualSystem sys{p, sigma, delta, w.period()};
    BranchRecord rec = continue_branch(sys, w, opts);
    rec.events = detect_bifurcations(rec);
    slots[static_cast<std::size_t>(i)] = WordRun{w, std::move(rec)};
  });
  std::vector<WordRun> out;
  out.reserve(ws.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

namespace {

struct TaggedEvent {
  std::size_t run = 0;
  bool labeled = true;
  BifurcationEvent ev;
};

bool close_orbits(const OrbitSequence& a, const OrbitSequence& b, double tol) {
  return a.period() == b.period() &&
         words::cyclic_orbit_distance(a, b) <= tol;
}

}  // namespace

double BifTable::min_event_epsilon(int period_cap) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& run : runs) {
    if (run.word.period() > period_cap) continue;
    for (const auto& ev : run.branch.events) m = std::min(m, ev.epsilon);
  }
  return m;
}

BifTable bifurcation_table(const StructuralParams& p, double sigma,
                           double delta, int max_period,
                           const BranchOptions& opts) {
  BifTable table{p, sigma, delta, max_period, {}, {}, {}, {}};
  const std::vector<SymbolSequence> ws = words::necklaces_up_to(max_period);
  table.runs = run_words(p, sigma, delta, ws, opts);

  std::vector<TaggedEvent> pds, folds, apexes;
  for (std::size_t i = 0; i < table.runs.size(); ++i) {
    const auto& run = table.runs[i];
    if (run.branch.termination == TerminationReason::StepUnderflow) {
      table.notes.push_back("branch " + run.word.to_string() + ": " +
                            run.branch.termination_detail);
    }
    // Past a genuine fold the branch runs on the partner's sheet, so the
    // source word only labels events up to (and including) the first fold.
    int first_fold_bracket = std::numeric_limits<int>::max();
    for (const auto& ev : run.branch.events) {
      if (ev.kind == BifurcationEvent::Kind::SaddleNode &&
          !ev.subharmonic_apex) {
        first_fold_bracket = std::min(first_fold_bracket, ev.bracket_index);
      }
    }
    for (const auto& ev : run.branch.events) {
      const bool labeled = ev.bracket_index <= first_fold_bracket;
      if (ev.kind == BifurcationEvent::Kind::PeriodDoubling) {
        pds.push_back({i, labeled, ev});
      } else if (ev.subharmonic_apex) {
        apexes.push_back({i, labeled, ev});
      } else {
        folds.push_back({i, labeled, ev});
      }
    }
  }

  // Period doublings: deduplicate sightings of the same parent orbit, then
  // attach the doubled-period branch whose apex sits on it.
  std::vector<bool> used(pds.size(), false);
  for (std::size_t i = 0; i < pds.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::size_t labeled_sighting = pds[i].labeled ? i : pds.size();
    for (std::size_t j = i + 1; j < pds.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(pds[i].ev.epsilon - pds[j].ev.epsilon) <= 1e-4 &&
          close_orbits(pds[i].ev.orbit, pds[j].ev.orbit, 1e-3)) {
        used[j] = true;
        if (labeled_sighting == pds.size() && pds[j].labeled) {
          labeled_sighting = j;
        }
      }
    }
    PdRow row;
    row.epsilon = pds[i].ev.epsilon;
    if (labeled_sighting < pds.size()) {
      row.parent = words::canonical(table.runs[pds[labeled_sighting].run].word);
    } else if (pds[i].ev.approach_word) {
      // Sighting on a foreign sheet only; extraction is the best guess.
      row.parent = words::canonical(*pds[i].ev.approach_word);
      table.notes.push_back("doubling at eps = " +
                            std::to_string(row.epsilon) +
                            ": parent attributed by extraction");
    } else {
      row.parent = words::canonical(table.runs[pds[i].run].word);
    }

    std::vector<double> dv;
    for (int t = 0; t < 2 * pds[i].ev.orbit.period(); ++t) {
      dv.push_back(pds[i].ev.orbit.at(t));
    }
    const OrbitSequence doubled_orbit(dv);
    for (const auto& apex : apexes) {
      if (!apex.labeled) continue;
      if (std::abs(apex.ev.epsilon - row.epsilon) > 1e-3) continue;
      if (!close_orbits(apex.ev.orbit, doubled_orbit, 1e-2)) continue;
      row.child = words::canonical(table.runs[apex.run].word);
      break;
    }
    if (!row.child) {
      const ResidualSystem sys{p, sigma, delta, pds[i].ev.orbit.period()};
      try {
        if (auto w = child_word_for_pd(sys, pds[i].ev, opts)) {
          row.child = words::canonical(*w);
        }
      } catch (const std::exception&) {
      }
    }
    if (row.child) {
      row.child_consistent =
          words::cyclic_hamming(*row.child, words::doubled(row.parent)) == 1;
    }
    table.pd_rows.push_back(std::move(row));
  }

  // Saddle-nodes: pair fold sightings across branches.
  std::vector<SnObservation> obs;
  obs.reserve(folds.size());
  for (const auto& f : folds) {
    obs.push_back({words::canonical(table.runs[f.run].word), f.labeled,
                   f.ev.epsilon, f.ev.orbit});
  }
  const PairingReport rep = saddle_node_pairing(obs);
  for (const auto& pr : rep.pairs) {
    SnRow row;
    row.pair = {obs[pr.index_a].source_word, obs[pr.index_b].source_word};
    row.epsilon = pr.epsilon;
    row.hamming = pr.hamming;
    row.orbit = obs[pr.index_a].orbit;
    if (pr.hamming < 0) {
      table.notes.push_back("fold pair at eps = " + std::to_string(pr.epsilon) +
                            " witnessed only past earlier folds; labels "
                            "uncertain");
    }
    table.sn_rows.push_back(std::move(row));
  }
  for (std::size_t idx : rep.unpaired) {
    SnRow row;
    row.pair = {obs[idx].source_word};
    const auto& ev = folds[idx].ev;
    if (ev.partner_word) {
      row.pair.push_back(words::canonical(*ev.partner_word));
      row.hamming = words::cyclic_hamming(row.pair[0], row.pair[1]);
    }
    row.epsilon = obs[idx].epsilon;
    row.orbit = obs[idx].orbit;
    table.notes.push_back("unpaired fold of " + obs[idx].source_word.to_string() +
                          " at eps = " + std::to_string(obs[idx].epsilon));
    table.sn_rows.push_back(std::move(row));
  }

  auto by_eps_pd = [](const PdRow& a, const PdRow& b) {
    return a.epsilon < b.epsilon;
  };
  auto by_eps_sn = [](const SnRow& a, const SnRow& b) {
    return a.epsilon < b.epsilon;
  };
  std::sort(table.pd_rows.begin(), table.pd_rows.end(), by_eps_pd);
  std::sort(table.sn_rows.begin(), table.sn_rows.end(), by_eps_sn);
  return table;
}

std::string pair_pattern(const SymbolSequence& a, const SymbolSequence& b) {
  if (a.period() != b.period()) {
    return a.to_string() + " / " + b.to_string();
  }
  const int n = a.period();
  int best_k = 0, best_d = n + 1;
  for (int k = 0; k < n; ++k) {
    int d = 0;
    for (int t = 0; t < n; ++t) {
      if (a.at(t) != b.at(t + k)) ++d;
    }
    if (d < best_d) {
      best_d = d;
      best_k = k;
    }
  }
  if (best_d != 1) {
    return a.to_string() + " / " + b.to_string();
  }
  std::string out;
  for (int t = 0; t < n; ++t) {
    if (a.at(t) != b.at(t + best_k)) {
      out += "\xC2\xB1";  // the differing slot
    } else {
      out.push_back(a.at(t) > 0 ? '+' : '-');
    }
  }
  return out;
}

}  // namespace aitk::sweep
