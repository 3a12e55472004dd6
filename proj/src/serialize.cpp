#include "qplab/serialize.hpp"

#include "qplab/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace qplab::io {

namespace {

const char* kModule = "serialize";

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return NAN;
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw Error(ErrorCode::invalid_argument, kModule, "not a number: '" + s + "'");
  return v;
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double to_double(const Json& j) {
  if (j.is_null()) return NAN;
  if (!j.is_number()) throw Error(ErrorCode::invalid_argument, kModule, "expected a number, got " + j.dump());
  return j.get<double>();
}

Json big(const cf::BigInt& x) { return x.str(); }

cf::BigInt to_big(const Json& j) {
  if (j.is_number_integer()) return cf::BigInt(j.get<long long>());
  if (!j.is_string()) throw Error(ErrorCode::invalid_argument, kModule, "expected an integer string");
  return cf::BigInt(j.get<std::string>());
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<Column> cols) : out_(out), width_(cols.size()) {
  for (size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i].name << '[' << cols[i].unit << ']';
  out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != width_) throw Error(ErrorCode::invalid_argument, kModule, "row width does not match the header");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) out_ << format_double(v);
          else out_ << v;
        },
        cells[i]);
  }
  out_ << '\n';
  ++rows_;
}

void write_jsonl(std::ostream& out, const std::vector<Json>& lines) {
  for (const auto& j : lines) out << j.dump() << '\n';
}

Json to_json(const cf::CfExpansion& cf) {
  Json j;
  j["alpha"] = cf.alpha.label;
  j["alpha_value"] = cf.alpha.value.str(40, std::ios_base::scientific);
  j["depth"] = cf.depth();
  Json a = Json::array(), p = Json::array(), q = Json::array(), lq = Json::array();
  for (int n = 0; n <= cf.depth(); ++n) {
    a.push_back(big(cf.a[n]));
    p.push_back(big(cf.p[n]));
    q.push_back(big(cf.q[n]));
    lq.push_back(number(cf.log_q[n]));
  }
  j["a"] = a;
  j["p"] = p;
  j["q"] = q;
  j["log_q"] = lq;
  j["terminated"] = cf.terminated;
  j["precision_limited"] = cf.precision_limited;
  return j;
}

Json to_json(const cf::BridgeSelection& sel) {
  Json j;
  j["A"] = number(sel.A);
  j["index"] = sel.index;
  Json via = Json::array();
  for (bool b : sel.via_bridge) via.push_back(b);
  j["via_bridge"] = via;
  j["exhausted"] = sel.exhausted;
  j["forward_pending"] = sel.forward_pending;
  return j;
}

Json to_json(const spectra::BandSet& s) {
  Json j = Json::array();
  for (const auto& iv : s.intervals()) j.push_back(Json::array({number(iv.a), number(iv.b)}));
  return j;
}

spectra::BandSet band_set_from_json(const Json& j) {
  std::vector<spectra::Interval> iv;
  for (const auto& e : j) iv.push_back({to_double(e.at(0)), to_double(e.at(1))});
  return spectra::BandSet(iv);
}

Json to_json(const kam::LedgerRecord& r) {
  Json j;
  j["level"] = r.level;
  j["log_eps_measured"] = number(r.log_eps_measured);
  j["log_eps_schedule"] = number(r.log_eps_schedule);
  j["residual"] = number(r.residual);
  j["phi_dist"] = number(r.phi_dist);
  j["divisor_margin"] = number(r.divisor_margin);
  return j;
}

kam::LedgerRecord ledger_record_from_json(const Json& j) {
  kam::LedgerRecord r;
  r.level = j.at("level").get<int>();
  r.log_eps_measured = to_double(j.at("log_eps_measured"));
  r.log_eps_schedule = to_double(j.at("log_eps_schedule"));
  r.residual = to_double(j.at("residual"));
  r.phi_dist = to_double(j.at("phi_dist"));
  r.divisor_margin = to_double(j.at("divisor_margin"));
  return r;
}

Json to_json(const kam::DivisorFloor& d) {
  Json j;
  j["min_abs"] = number(d.min_abs);
  j["bound"] = number(d.bound);
  j["holds"] = d.holds;
  j["worst_k"] = d.worst_k;
  j["worst_sign"] = d.worst_sign;
  return j;
}

Json to_json(const kam::StepReport& r) {
  Json j;
  j["level"] = r.level;
  j["Qbar"] = number(r.Qbar);
  j["Qbar_next"] = number(r.Qbar_next);
  j["Q_half"] = r.Q_half;
  j["norm_F_in"] = number(r.norm_F_in);
  j["norm_F_out"] = number(r.norm_F_out);
  j["norm_F_tilde"] = number(r.norm_F_tilde);
  j["phi_dist"] = number(r.phi_dist);
  j["phi_constant"] = number(r.phi_constant);
  j["residual"] = number(r.residual);
  j["cohom_residual"] = number(r.cohom_residual);
  j["divisor"] = to_json(r.divisor);
  j["newton_iterations"] = r.newton_iterations;
  j["log_eps_schedule"] = number(r.log_eps_schedule);
  return j;
}

}  // namespace qplab::io
