#include "rkdmd/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rkdmd {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back(std::string());
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void CsvTable::validate() const {
  if (header.empty()) throw ConfigError("csv: table has no columns");
  if (header.size() != cols.size())
    throw ConfigError("csv: header and column counts differ");
  for (std::size_t c = 1; c < cols.size(); ++c)
    if (cols[c].size() != cols[0].size())
      throw ConfigError("csv: column '" + header[c] + "' has ragged length");
}

int CsvTable::find(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return static_cast<int>(c);
  return -1;
}

void write_csv(const std::string& path, const CsvTable& table) {
  table.validate();
  std::ofstream out(path);
  if (!out) throw ConfigError("csv: cannot write '" + path + "'");
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c) out << ',';
    out << table.header[c];
  }
  out << '\n';
  const std::size_t rows = table.cols[0].size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < table.cols.size(); ++c) {
      if (c) out << ',';
      out << format_double(table.cols[c][r]);
    }
    out << '\n';
  }
  if (!out) throw ConfigError("csv: write to '" + path + "' failed");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("csv: cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("csv: '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  CsvTable table;
  table.header = split_line(line);
  table.cols.resize(table.header.size());

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != table.header.size()) {
      std::ostringstream msg;
      msg << "csv: '" << path << "' line " << lineno << " has "
          << fields.size() << " fields, expected " << table.header.size();
      throw ConfigError(msg.str());
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(fields[c].c_str(), &end);
      if (end == fields[c].c_str() || *end != '\0') {
        std::ostringstream msg;
        msg << "csv: '" << path << "' line " << lineno
            << ": cannot parse value '" << fields[c] << "'";
        throw ConfigError(msg.str());
      }
      table.cols[c].push_back(v);
    }
  }
  table.validate();
  return table;
}

CsvTable kernel_table(const KernelSeries& series) {
  series.validate();
  CsvTable table;
  table.header.push_back("t");
  table.cols.push_back(series.grid.times());
  for (const auto& [label, values] : series.comp) {
    std::vector<double> re(values.size()), im(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      re[i] = values[i].real();
      im[i] = values[i].imag();
    }
    table.header.push_back(label + "_re");
    table.cols.push_back(std::move(re));
    table.header.push_back(label + "_im");
    table.cols.push_back(std::move(im));
  }
  return table;
}

KernelSeries kernel_from_table(const CsvTable& table) {
  table.validate();
  const int tcol = table.find("t");
  if (tcol < 0) throw ConfigError("csv: no 't' column in series table");
  const std::vector<double>& t = table.cols[static_cast<std::size_t>(tcol)];
  if (t.size() < 2) throw ConfigError("csv: series needs at least two rows");

  KernelSeries series;
  series.grid.t0 = t[0];
  series.grid.dt = t[1] - t[0];
  series.grid.n = static_cast<int>(t.size());
  series.grid.validate();
  for (std::size_t i = 2; i < t.size(); ++i) {
    const double expected = series.grid.time(static_cast<int>(i));
    if (std::abs(t[i] - expected) >
        1e-9 * std::max(1.0, std::abs(expected)))
      throw ConfigError("csv: 't' column is not uniformly spaced");
  }

  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (static_cast<int>(c) == tcol) continue;
    const std::string& name = table.header[c];
    if (ends_with(name, "_im")) continue;  // picked up with its _re partner
    std::string label = name;
    const std::vector<double>& re = table.cols[c];
    std::vector<Complex> values(re.size());
    if (ends_with(name, "_re")) {
      label = name.substr(0, name.size() - 3);
      const int imcol = table.find(label + "_im");
      if (imcol >= 0) {
        const std::vector<double>& im =
            table.cols[static_cast<std::size_t>(imcol)];
        for (std::size_t i = 0; i < re.size(); ++i)
          values[i] = Complex(re[i], im[i]);
      } else {
        for (std::size_t i = 0; i < re.size(); ++i)
          values[i] = Complex(re[i], 0.0);
      }
    } else {
      for (std::size_t i = 0; i < re.size(); ++i)
        values[i] = Complex(re[i], 0.0);
    }
    if (series.comp.count(label))
      throw ConfigError("csv: duplicate component '" + label + "'");
    series.comp[label] = std::move(values);
  }
  if (series.comp.empty())
    throw ConfigError("csv: series table has no value columns");
  return series;
}

CsvTable spectrum_table(const SpectrumSeries& spec) {
  CsvTable table;
  table.header.push_back("omega");
  table.cols.push_back(spec.omega);
  for (const auto& [label, values] : spec.comp) {
    std::vector<double> re(values.size()), im(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      re[i] = values[i].real();
      im[i] = values[i].imag();
    }
    table.header.push_back(label + "_re");
    table.cols.push_back(std::move(re));
    table.header.push_back(label + "_im");
    table.cols.push_back(std::move(im));
  }
  return table;
}

}  // namespace rkdmd
