#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "blockmax/blocks.hpp"
#include "blockmax/matrix.hpp"

namespace blockmax {

/// Shortest text that parses back to the same double; "nan", "inf", "-inf" otherwise.
std::string format_double(double v);

/// A numeric table. A first line containing a non-numeric field is taken as
/// the header. Blank lines and lines starting with '#' are skipped.
struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

/// Data columns of a series or block-maxima file: a leading `t` or `start`
/// column is dropped.
Matrix data_columns(const CsvTable& table);

/// `t,x1[,x2...]` with t counting from 1.
void write_series_csv(std::ostream& os, const Matrix& series);
/// `start,m1[,m2...]` with the 1-based start index of each block.
void write_blockmax_csv(std::ostream& os, const BlockMaxSample& sample);

}  // namespace blockmax
