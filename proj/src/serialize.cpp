#include "aitk/serialize.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

namespace aitk::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string orbit_csv(const SymbolSequence& word, const OrbitSequence& xi) {
  if (word.period() != xi.period()) {
    throw DomainError("word and orbit periods must match");
  }
  std::string out = "t,s,xi\n";
  for (int t = 0; t < xi.period(); ++t) {
    out += std::to_string(t);
    out += ',';
    out += word.at(t) > 0 ? "1" : "-1";
    out += ',';
    out += format_double(xi.at(t));
    out += '\n';
  }
  return out;
}

void audit_residual(const StructuralParams& p, double sigma, double delta,
                    double eps, const OrbitSequence& xi, double tol) {
  const ResidualSystem sys{p, sigma, delta, xi.period()};
  const std::vector<double> g = residual(sys, xi, eps);
  for (std::size_t t = 0; t < g.size(); ++t) {
    if (!(std::abs(g[t]) < tol)) {
      throw NumericalError("residual audit failed at index " +
                           std::to_string(t) + ": |G| = " +
                           format_double(std::abs(g[t])));
    }
  }
}

void apply_event_flags(BranchRecord& rec) {
  for (const auto& ev : rec.events) {
    if (ev.bracket_index < 0 ||
        ev.bracket_index >= static_cast<int>(rec.points.size())) {
      continue;
    }
    auto& pt = rec.points[static_cast<std::size_t>(ev.bracket_index)];
    if (ev.kind == BifurcationEvent::Kind::SaddleNode) {
      pt.fold_flag = true;
    } else {
      pt.pd_flag = true;
    }
  }
}

namespace {

nlohmann::ordered_json word_json(const SymbolSequence& s) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (int v : s.word()) arr.push_back(v);
  return arr;
}

}  // namespace

nlohmann::ordered_json branch_record_json(const BranchRecord& rec) {
  nlohmann::ordered_json j;
  j["params"] = {{"a", rec.sys.p.a()},
                 {"b", rec.sys.p.b()},
                 {"c", rec.sys.p.c()},
                 {"sigma", rec.sys.sigma},
                 {"delta", rec.sys.delta}};
  j["word"] = word_json(rec.word);

  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (const auto& pt : rec.points) {
    nlohmann::ordered_json pj;
    pj["epsilon"] = pt.epsilon;
    pj["xi"] = pt.xi.values();
    nlohmann::ordered_json mults = nlohmann::ordered_json::array();
    for (const auto& m : pt.multipliers) {
      mults.push_back({m.real(), m.imag()});
    }
    pj["multipliers"] = std::move(mults);
    nlohmann::ordered_json flags = nlohmann::ordered_json::array();
    if (pt.converged) flags.push_back("Converged");
    if (pt.fold_flag) flags.push_back("Fold");
    if (pt.pd_flag) flags.push_back("PeriodDoubling");
    pj["flags"] = std::move(flags);
    pts.push_back(std::move(pj));
  }
  j["points"] = std::move(pts);

  nlohmann::ordered_json evs = nlohmann::ordered_json::array();
  for (const auto& ev : rec.events) {
    nlohmann::ordered_json ej;
    ej["kind"] = to_string(ev.kind);
    ej["epsilon"] = ev.epsilon;
    if (ev.partner_word) {
      ej["partner"] = word_json(*ev.partner_word);
    } else {
      ej["partner"] = nullptr;
    }
    evs.push_back(std::move(ej));
  }
  j["events"] = std::move(evs);
  return j;
}

nlohmann::ordered_json run_record_json(const RunRecord& rec) {
  nlohmann::ordered_json j;
  j["command"] = rec.command;
  j["preset"] = rec.preset;
  j["params"] = rec.params;
  j["word"] = rec.word;
  j["options"] = rec.options;
  j["outputs"] = rec.outputs;
  j["termination"] = rec.termination;
  j["started_at"] = rec.started_at;
  j["finished_at"] = rec.finished_at;
  return j;
}

RunRecord parse_run_record(const nlohmann::json& j) {
  RunRecord rec;
  rec.command = j.at("command").get<std::string>();
  rec.preset = j.at("preset").get<std::string>();
  rec.params = j.at("params");
  rec.word = j.at("word").get<std::string>();
  rec.options = j.at("options");
  rec.outputs = j.at("outputs").get<std::vector<std::string>>();
  rec.termination = j.at("termination").get<std::string>();
  rec.started_at = j.at("started_at").get<std::string>();
  rec.finished_at = j.at("finished_at").get<std::string>();
  return rec;
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace aitk::io
