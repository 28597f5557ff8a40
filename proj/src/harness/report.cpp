#include "modrecip/harness/report.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace modrecip::harness {

namespace {

using Json = nlohmann::ordered_json;

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string render_json(const Report& report, bool timings) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["experiment"] = std::string(to_string(report.config.experiment));
  Json inputs = Json::object();
  for (const auto& [key, value] : echo(report.config)) inputs[key] = value;
  doc["inputs"] = std::move(inputs);

  Json rows = Json::array();
  for (const Row& r : report.rows) {
    Json row;
    row["instance"] = r.instance;
    row["n"] = r.n;
    row["p"] = number(r.p);
    row["norm"] = std::string(to_string(r.norm));
    row["status"] = r.status;
    row["value"] = number(r.value);
    row["reference"] = number(r.reference);
    row["rel_error"] = number(r.rel_error);
    row["tolerance"] = number(r.tolerance);
    row["pass"] = r.pass;
    Json details = Json::object();
    for (const auto& [key, value] : r.details) details[key] = number(value);
    row["details"] = std::move(details);
    if (timings) row["seconds"] = r.seconds;
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);

  // n against value for each exponent
  Json table = Json::object();
  for (const Row& r : report.rows) {
    auto& column = table[r.instance + "@p=" + csv_number(r.p)];
    column.push_back(Json::array({r.n, number(r.value)}));
  }
  doc["tables"] = std::move(table);
  doc["pass"] = report.pass;
  return doc.dump(2) + "\n";
}

void emit_csv(const Report& report, std::ostream& out) {
  out << "experiment,n,p,norm,value,reference,rel_error,tolerance,pass\n";
  for (const Row& r : report.rows)
    out << r.instance << ',' << r.n << ',' << csv_number(r.p) << ',' << to_string(r.norm) << ','
        << csv_number(r.value) << ',' << csv_number(r.reference) << ','
        << csv_number(r.rel_error) << ',' << csv_number(r.tolerance) << ','
        << (r.pass ? "true" : "false") << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace modrecip::harness
