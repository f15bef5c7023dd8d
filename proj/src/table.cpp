#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "kboot/error.hpp"
#include "kboot/harness.hpp"

namespace kboot {

namespace {

constexpr const char* kCsvHeader = "design,case,n,rho,method,k,alpha,reps,rate,se,runtime_s";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string render_csv(const SizeTable& table) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const SizeRow& r : table.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{:.4f},{},{:.3f}\n", to_string(r.design), to_string(r.data_case),
                       r.n, r.rho, to_string(r.method), r.k, r.alpha, r.reps, r.rate, r.se, r.runtime_s);
  }
  return out;
}

std::string render_markdown(const SizeTable& table) {
  std::vector<Method> methods = table.method_order;
  if (methods.empty())
    for (const SizeRow& r : table.rows)
      if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);

  std::string out;
  if (!table.rows.empty())
    out += fmt::format("Empirical rejection rates at nominal level {} ({} replications per cell).\n\n",
                       table.rows.front().alpha, table.rows.front().reps);

  const std::pair<DataCase, const char*> panels[] = {{DataCase::Asymmetric, "Panel A: asymmetric case"},
                                                     {DataCase::Symmetric, "Panel B: symmetric case"}};
  for (const auto& [data_case, title] : panels) {
    using Key = std::tuple<Design, int, double, int>;
    std::vector<Key> order;
    std::map<Key, std::map<Method, double>> cells;
    for (const SizeRow& r : table.rows) {
      if (r.data_case != data_case) continue;
      const Key key{r.design, r.n, r.rho, r.k};
      if (!cells.count(key)) order.push_back(key);
      cells[key][r.method] = r.rate;
    }
    if (order.empty()) continue;
    out += fmt::format("## {}\n\n| Design | n | rho | k |", title);
    for (Method m : methods) out += fmt::format(" {} |", to_string(m));
    out += "\n|---|---|---|---|";
    for (std::size_t i = 0; i < methods.size(); ++i) out += "---|";
    out += "\n";
    for (const Key& key : order) {
      out += fmt::format("| {} | {} | {} | {} |", to_string(std::get<0>(key)), std::get<1>(key), std::get<2>(key),
                         std::get<3>(key));
      for (Method m : methods) {
        const auto& row = cells[key];
        const auto it = row.find(m);
        out += it == row.end() ? std::string(" - |") : fmt::format(" {:.4f} |", it->second);
      }
      out += "\n";
    }
    out += "\n";
  }
  return out;
}

std::string render_json(const SizeTable& table) {
  nlohmann::json doc = nlohmann::json::array();
  for (const SizeRow& r : table.rows) {
    doc.push_back({{"design", to_string(r.design)},
                   {"case", to_string(r.data_case)},
                   {"n", r.n},
                   {"rho", r.rho},
                   {"method", to_string(r.method)},
                   {"k", r.k},
                   {"alpha", r.alpha},
                   {"reps", r.reps},
                   {"rate", r.rate},
                   {"se", r.se},
                   {"runtime_s", r.runtime_s}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace

TableFormat parse_format(const std::string& text) {
  if (text == "csv") return TableFormat::Csv;
  if (text == "markdown" || text == "md") return TableFormat::Markdown;
  if (text == "json") return TableFormat::Json;
  fail(ErrorCode::ConfigError, "config field 'format': expected csv, markdown or json, got '" + text + "'");
}

std::string render_table(const SizeTable& table, TableFormat format) {
  switch (format) {
    case TableFormat::Csv: return render_csv(table);
    case TableFormat::Markdown: return render_markdown(table);
    case TableFormat::Json: return render_json(table);
  }
  return {};
}

SizeTable parse_table_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line != kCsvHeader)
    fail(ErrorCode::IOError, "size table CSV: unexpected header");
  SizeTable table;
  int line_no = 1;
  while (std::getline(ss, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 11) fail(ErrorCode::IOError, fmt::format("size table CSV line {}: expected 11 fields", line_no));
    try {
      SizeRow r;
      r.design = parse_design(f[0]);
      r.data_case = parse_case(f[1]);
      r.n = std::stoi(f[2]);
      r.rho = std::stod(f[3]);
      r.method = parse_method(f[4]);
      r.k = std::stoi(f[5]);
      r.alpha = std::stod(f[6]);
      r.reps = std::stoi(f[7]);
      r.rate = std::stod(f[8]);
      r.se = std::stod(f[9]);
      r.runtime_s = std::stod(f[10]);
      if (std::find(table.method_order.begin(), table.method_order.end(), r.method) == table.method_order.end())
        table.method_order.push_back(r.method);
      table.rows.push_back(r);
    } catch (const std::exception& e) {
      fail(ErrorCode::IOError, fmt::format("size table CSV line {}: {}", line_no, e.what()));
    }
  }
  return table;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IOError, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail(ErrorCode::IOError, "failed writing '" + path + "'");
}

}  // namespace kboot
