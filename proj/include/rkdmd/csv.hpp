#ifndef RKDMD_CSV_HPP
#define RKDMD_CSV_HPP

#include <string>
#include <vector>

#include "rkdmd/kernels.hpp"

namespace rkdmd {

// Column-oriented numeric table.  Files carry one header row and values
// printed with 17 significant digits, so a rerun of the same computation
// reproduces the bytes exactly.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> cols;

  void validate() const;
  int find(const std::string& name) const;  // -1 when absent
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

// Kernel series as a table: t, then <label>_re, <label>_im per component.
CsvTable kernel_table(const KernelSeries& series);
// Inverse mapping.  Columns named *_re/*_im pair up into complex series;
// any other column is taken as a purely real component.  The t column must
// be uniformly spaced.
KernelSeries kernel_from_table(const CsvTable& table);

CsvTable spectrum_table(const SpectrumSeries& spec);

}  // namespace rkdmd

#endif  // RKDMD_CSV_HPP
