#include "boundcount/report.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace boundcount {

namespace {

const char* const kTable1Csv =
#include "boundcount/table1_csv.inc"
    ;
const char* const kTable2Csv =
#include "boundcount/table2_csv.inc"
    ;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<GoldenRow> parse_golden(const char* text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  std::vector<GoldenRow> rows;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (header.empty()) {
      header = f;
      if (header.size() != table_columns().size() + 2) throw InvariantViolation("golden table header is malformed");
      continue;
    }
    if (f.size() != header.size()) throw InvariantViolation("golden table row has the wrong width: " + line);
    GoldenRow r;
    r.g = std::stoi(f[0]);
    r.ell = std::stoi(f[1]);
    for (std::size_t i = 2; i < f.size(); ++i) r.cells[header[i]] = std::stol(f[i]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* strictness_name(Strictness s) {
  switch (s) {
    case Strictness::strict: return "strict";
    case Strictness::inclusive: return "inclusive";
    case Strictness::floored: return "floored";
  }
  return "strict";
}

Strictness strictness_from(const std::string& s) {
  if (s == "strict") return Strictness::strict;
  if (s == "inclusive") return Strictness::inclusive;
  if (s == "floored") return Strictness::floored;
  throw ConfigError("unknown strictness '" + s + "'");
}

// JSON has no infinities; they travel as strings.
nlohmann::json raw_to_json(const std::optional<double>& raw) {
  if (!raw) return nullptr;
  if (std::isinf(*raw)) return *raw > 0 ? "inf" : "-inf";
  return *raw;
}

std::optional<double> raw_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ConfigError("bad raw value '" + s + "'");
  }
  return j.get<double>();
}

nlohmann::json tol_to_json(const Tolerances& t) {
  return {{"quad_rel", t.quad_rel}, {"quad_abs", t.quad_abs},   {"root_tol", t.root_tol},
          {"ode_rel", t.ode_rel},   {"tail_tol", t.tail_tol},   {"max_subdivisions", t.max_subdivisions},
          {"max_steps", t.max_steps}, {"origin_eps", t.origin_eps}};
}

Tolerances tol_from_json(const nlohmann::json& j) {
  Tolerances t;
  t.quad_rel = j.at("quad_rel").get<double>();
  t.quad_abs = j.at("quad_abs").get<double>();
  t.root_tol = j.at("root_tol").get<double>();
  t.ode_rel = j.at("ode_rel").get<double>();
  t.tail_tol = j.at("tail_tol").get<double>();
  t.max_subdivisions = j.at("max_subdivisions").get<int>();
  t.max_steps = j.at("max_steps").get<long>();
  t.origin_eps = j.at("origin_eps").get<double>();
  return t;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

const std::vector<std::string>& table_columns() {
  static const std::vector<std::string> cols{"LLSK", "NLL3", "NLL1nl", "NLL2l", "Ex",   "NUL2l",
                                             "BSl",  "CMS",  "Ml",     "GGMT",  "NUL1l", "ULSK"};
  return cols;
}

const std::vector<GoldenRow>& golden_table(int which) {
  static const std::vector<GoldenRow> t1 = parse_golden(kTable1Csv);
  static const std::vector<GoldenRow> t2 = parse_golden(kTable2Csv);
  if (which == 1) return t1;
  if (which == 2) return t2;
  throw ConfigError("table must be 1 or 2");
}

Potential table_potential(int which, double g) {
  const PotentialKind k = which == 1 ? PotentialKind::exponential : PotentialKind::yukawa;
  if (which != 1 && which != 2) throw ConfigError("table must be 1 or 2");
  return make_builtin(k, {{"g", g}, {"R", 1.0}});
}

TableResult compute_table(int which, const Tolerances& tol) {
  const auto t0 = std::chrono::steady_clock::now();
  TableResult out;
  out.which = which;
  std::vector<std::string> ids;
  for (const auto& c : table_columns())
    if (c != "Ex") ids.push_back(c);

  for (const GoldenRow& gr : golden_table(which)) {
    const Potential pot = table_potential(which, gr.g);
    TableRow row;
    row.g = gr.g;
    row.ell = gr.ell;
    row.exact = count_partial_wave(pot, gr.ell, tol).N;
    const Channel ch = make_channel(pot, gr.ell, tol);
    std::map<std::string, LimitValue> vals;
    for (auto& v : evaluate_all(ch, ids)) vals.emplace(v.id, std::move(v));

    for (const auto& col : table_columns()) {
      TableCell c;
      c.column = col;
      c.golden = gr.cells.at(col);
      if (col == "Ex") {
        c.computed = row.exact;
        c.match = c.computed == c.golden;
      } else {
        const LimitValue& v = vals.at(col);
        c.raw = v.raw;
        if (!v.applicable) {
          c.note = "inapplicable: " + v.reason;
          c.match = false;
        } else {
          c.computed = v.table_value();
          if (col == "LLSK") {
            c.match = std::abs(c.computed - c.golden) <= 1 && c.computed <= row.exact;
            if (c.match && c.computed != c.golden) c.note = "within the start-point allowance";
          } else {
            c.match = c.computed == c.golden;
          }
        }
      }
      if (!c.match) ++out.mismatches;
      row.cells.push_back(std::move(c));
    }
    out.rows.push_back(std::move(row));
  }
  out.seconds = seconds_since(t0);
  return out;
}

std::string format_table(const TableResult& t) {
  std::ostringstream os;
  os << "Table " << t.which << " (" << (t.which == 1 ? "exponential" : "Yukawa") << " potential)\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%4s %4s", "g", "l");
  os << buf;
  for (const auto& c : table_columns()) {
    std::snprintf(buf, sizeof buf, " %7s", c.c_str());
    os << buf;
  }
  os << '\n';
  std::vector<std::string> notes;
  for (const auto& r : t.rows) {
    std::snprintf(buf, sizeof buf, "%4d %4d", r.g, r.ell);
    os << buf;
    for (const auto& c : r.cells) {
      std::string cell = std::to_string(c.computed);
      if (!c.match) cell += "*";
      if (c.note.rfind("inapplicable", 0) == 0) cell = "-*";
      std::snprintf(buf, sizeof buf, " %7s", cell.c_str());
      os << buf;
      if (!c.match) {
        std::ostringstream n;
        n << "  g=" << r.g << " l=" << r.ell << " " << c.column << ": computed " << c.computed << ", table "
          << c.golden;
        if (c.raw) n << " (raw " << num(*c.raw) << ")";
        if (!c.note.empty()) n << " " << c.note;
        notes.push_back(n.str());
      }
    }
    os << '\n';
  }
  os << "mismatches: " << t.mismatches << '\n';
  for (const auto& n : notes) os << n << '\n';
  return os.str();
}

std::string table_csv(const TableResult& t) {
  std::ostringstream os;
  os << "table,g,ell,column,computed,golden,match,raw\n";
  for (const auto& r : t.rows)
    for (const auto& c : r.cells)
      os << t.which << ',' << r.g << ',' << r.ell << ',' << c.column << ',' << c.computed << ',' << c.golden << ','
         << (c.match ? 1 : 0) << ',' << (c.raw ? num(*c.raw) : "") << '\n';
  return os.str();
}

// ---- RunRecord ------------------------------------------------------------

std::string RunRecord::to_json() const {
  nlohmann::json j;
  j["version"] = version;
  j["command"] = command;
  j["potential"] = potential;
  j["ell"] = ell;
  j["tolerances"] = tol_to_json(tol);
  j["exact"] = exact ? nlohmann::json(*exact) : nlohmann::json(nullptr);
  j["warnings"] = warnings;
  j["wall_time_s"] = wall_time_s;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : limits) {
    nlohmann::json a;
    a["id"] = v.id;
    a["kind"] = to_string(v.kind);
    a["strictness"] = strictness_name(v.strictness);
    a["applicable"] = v.applicable;
    a["raw"] = raw_to_json(v.raw);
    a["integer_statement"] = v.integer_statement;
    a["reason"] = v.reason;
    a["warnings"] = v.warnings;
    nlohmann::json aux = nlohmann::json::object();
    for (const auto& [k, x] : v.auxiliary) aux[k] = raw_to_json(x);
    a["auxiliary"] = aux;
    arr.push_back(std::move(a));
  }
  j["limits"] = std::move(arr);
  return j.dump();
}

RunRecord RunRecord::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RunRecord r;
    r.version = j.at("version").get<std::string>();
    r.command = j.at("command").get<std::string>();
    r.potential = j.at("potential").get<std::string>();
    r.ell = j.at("ell").get<int>();
    r.tol = tol_from_json(j.at("tolerances"));
    if (!j.at("exact").is_null()) r.exact = j.at("exact").get<long>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    for (const auto& a : j.at("limits")) {
      LimitValue v;
      v.id = a.at("id").get<std::string>();
      v.kind = a.at("kind").get<std::string>() == "upper" ? LimitKind::upper : LimitKind::lower;
      v.strictness = strictness_from(a.at("strictness").get<std::string>());
      v.applicable = a.at("applicable").get<bool>();
      v.raw = raw_from_json(a.at("raw"));
      v.integer_statement = a.at("integer_statement").get<long>();
      v.reason = a.at("reason").get<std::string>();
      v.warnings = a.at("warnings").get<std::vector<std::string>>();
      for (const auto& [k, x] : a.at("auxiliary").items()) v.auxiliary[k] = *raw_from_json(x);
      r.limits.push_back(std::move(v));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run record: ") + e.what());
  }
}

const std::string& RunRecord::csv_header() {
  static const std::string h =
      "version,command,potential,ell,exact,limit_id,kind,strictness,applicable,raw,integer_statement,"
      "table_value,reason,wall_time_s";
  return h;
}

std::string RunRecord::to_csv_rows() const {
  std::ostringstream os;
  const std::string head = csv_field(version) + ',' + csv_field(command) + ',' + csv_field(potential) + ',' +
                           std::to_string(ell) + ',' + (exact ? std::to_string(*exact) : "");
  const std::string tail = num(wall_time_s);
  if (limits.empty()) os << head << ",,,,,,,,," << tail << '\n';
  for (const auto& v : limits) {
    os << head << ',' << v.id << ',' << to_string(v.kind) << ',' << strictness_name(v.strictness) << ','
       << (v.applicable ? 1 : 0) << ',' << (v.raw ? num(*v.raw) : "") << ',';
    if (v.applicable) os << v.integer_statement << ',' << v.table_value();
    else os << ',';
    os << ',' << csv_field(v.reason) << ',' << tail << '\n';
  }
  return os.str();
}

// ---- sweeps ---------------------------------------------------------------

std::vector<std::string> expand_quantities(const std::vector<std::string>& q) {
  std::vector<std::string> out;
  auto add = [&](const std::string& s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  for (const auto& raw : q) {
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s == "limits") {
      for (const auto& id : limit_ids()) add(id);
    } else if (s == "L_bounds") {
      for (const auto& id : l_bound_ids()) add(id);
    } else if (s == "N_bounds") {
      for (const auto& id : total_bound_ids()) add(id);
    } else if (s == "N0" || s == "L" || s == "N" || is_limit_id(s) ||
               std::find(l_bound_ids().begin(), l_bound_ids().end(), s) != l_bound_ids().end() ||
               std::find(total_bound_ids().begin(), total_bound_ids().end(), s) != total_bound_ids().end()) {
      add(s);
    } else {
      throw ConfigError("unknown sweep quantity '" + s + "'");
    }
  }
  return out;
}

std::vector<double> SweepRange::values() const {
  std::vector<double> v;
  const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(lo + static_cast<double>(i) * step);
  return v;
}

SweepRange parse_range(const std::string& text) {
  const auto f = split(text, ':');
  if (f.size() != 2 && f.size() != 3) throw ConfigError("range must be lo:hi or lo:hi:step, got '" + text + "'");
  SweepRange r;
  try {
    std::size_t used = 0;
    auto parse = [&](const std::string& s) {
      const double x = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(x)) throw ConfigError("bad number '" + s + "' in range");
      return x;
    };
    r.lo = parse(f[0]);
    r.hi = parse(f[1]);
    if (f.size() == 3) r.step = parse(f[2]);
  } catch (const std::logic_error&) {
    throw ConfigError("bad number in range '" + text + "'");
  }
  if (!(r.step > 0.0) || r.hi < r.lo) throw ConfigError("range needs lo <= hi and step > 0");
  return r;
}

Potential family_member(const std::string& family_spec, double g) {
  char gtxt[40];
  std::snprintf(gtxt, sizeof gtxt, "g=%.17g", g);
  bool has_params;
  if (family_spec.rfind("expr:", 0) == 0) {
    const std::string rest = family_spec.substr(5);
    std::size_t end;
    if (!rest.empty() && (rest[0] == '\'' || rest[0] == '"')) {
      end = rest.find(rest[0], 1);
      if (end == std::string::npos) throw ConfigError("unterminated quoted expression");
      ++end;
    } else {
      end = rest.find(':');
    }
    has_params = end != std::string::npos && end < rest.size() && rest.size() > end + 1;
  } else {
    has_params = family_spec.find(':') != std::string::npos;
  }
  return parse_potential_spec(family_spec + (has_params ? "," : ":") + gtxt);
}

std::string sweep_csv(const std::string& family_spec, const SweepRange& range,
                      const std::vector<std::string>& quantities, int ell, const Tolerances& tol, int threads) {
  const std::vector<std::string> q = expand_quantities(quantities);
  std::ostringstream os;
  os << "g";
  for (const auto& s : q) {
    if (s == "N0" || s == "L" || s == "N") os << ',' << s;
    else os << ',' << s << "_raw," << s << "_int";
  }
  os << '\n';
  if (q.empty()) return os.str();

  const bool want_l = std::any_of(q.begin(), q.end(), [](const auto& s) {
    return std::find(l_bound_ids().begin(), l_bound_ids().end(), s) != l_bound_ids().end();
  });
  const bool want_n = std::any_of(q.begin(), q.end(), [](const auto& s) {
    return std::find(total_bound_ids().begin(), total_bound_ids().end(), s) != total_bound_ids().end();
  });
  std::vector<std::string> chan_ids;
  for (const auto& s : q)
    if (is_limit_id(s)) chan_ids.push_back(s);

  auto row = [&](double g) {
    const Potential pot = family_member(family_spec, g);
    std::map<std::string, LimitValue> vals;
    if (!chan_ids.empty())
      for (auto& v : evaluate_all(make_channel(pot, ell, tol), chan_ids)) vals.emplace(v.id, std::move(v));
    if (want_l)
      for (auto& v : l_bounds(pot, tol)) vals.emplace(v.id, std::move(v));
    if (want_n)
      for (auto& v : total_bounds(pot, tol)) vals.emplace(v.id, std::move(v));
    std::ostringstream r;
    r << num(g);
    for (const auto& s : q) {
      if (s == "N0") r << ',' << count_partial_wave(pot, ell, tol).N;
      else if (s == "L") r << ',' << find_L_exact(pot, tol);
      else if (s == "N") r << ',' << total_count(pot, tol);
      else {
        const LimitValue& v = vals.at(s);
        if (v.applicable) r << ',' << num(*v.raw) << ',' << v.table_value();
        else r << ",,";
      }
    }
    r << '\n';
    return r.str();
  };

  const std::vector<double> gs = range.values();
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t width = threads > 0 ? static_cast<std::size_t>(threads) : hw;
  std::vector<std::string> rows(gs.size());
  for (std::size_t base = 0; base < gs.size(); base += width) {
    std::vector<std::future<std::string>> jobs;
    const std::size_t end = std::min(gs.size(), base + width);
    for (std::size_t i = base; i < end; ++i) jobs.push_back(std::async(std::launch::async, row, gs[i]));
    for (std::size_t i = base; i < end; ++i) rows[i] = jobs[i - base].get();
  }
  for (const auto& r : rows) os << r;
  return os.str();
}

}  // namespace boundcount
