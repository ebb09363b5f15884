#include "stpn/timeseries.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace stpn {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, long row, std::size_t col) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ValidationError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                          ", column " + std::to_string(col));
  }
  return v;
}

}  // namespace

int TimeSeriesFrame::channel_index(const std::string& name) const {
  auto it = std::find(channels.begin(), channels.end(), name);
  if (it == channels.end()) throw ValidationError("channel '" + name + "' not present");
  return static_cast<int>(it - channels.begin());
}

LoadResult load_csv(const std::string& path, const std::optional<std::vector<std::string>>& schema) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("'" + path + "' is empty");
  std::vector<std::string> header = split_csv_line(line);
  if (header.empty()) throw ValidationError("'" + path + "' has an empty header");

  // Map output channels onto file columns.
  std::vector<std::string> out_channels = schema ? *schema : header;
  std::vector<std::size_t> col_of(out_channels.size());
  for (std::size_t i = 0; i < out_channels.size(); ++i) {
    auto it = std::find(header.begin(), header.end(), out_channels[i]);
    if (it == header.end()) {
      throw ValidationError("schema channel '" + out_channels[i] + "' absent from '" + path + "'");
    }
    col_of[i] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::vector<double>> rows;
  long dropped = 0;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ValidationError("row " + std::to_string(line_no) + " of '" + path + "' has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
    }
    std::vector<double> row(out_channels.size());
    bool finite = true;
    for (std::size_t i = 0; i < out_channels.size(); ++i) {
      row[i] = parse_cell(cells[col_of[i]], line_no, col_of[i]);
      if (!std::isfinite(row[i])) finite = false;
    }
    if (!finite) {
      ++dropped;
      continue;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("'" + path + "' has no usable data rows");

  TimeSeriesFrame frame;
  frame.channels = std::move(out_channels);
  frame.data.resize(static_cast<long>(rows.size()), static_cast<long>(frame.channels.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      frame.data(static_cast<long>(r), static_cast<long>(c)) = rows[r][c];
    }
  }
  return {std::move(frame), dropped};
}

void write_csv(const TimeSeriesFrame& frame, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  for (std::size_t c = 0; c < frame.channels.size(); ++c) {
    if (c) out << ',';
    out << frame.channels[c];
  }
  out << '\n';
  char buf[64];
  for (long r = 0; r < frame.data.rows(); ++r) {
    for (long c = 0; c < frame.data.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", frame.data(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw ValidationError("write to '" + path + "' failed");
}

long window_count(long samples, const WindowSpec& spec) {
  if (spec.window_length < 2) throw ValidationError("window_length must be at least 2");
  if (spec.stride < 1) throw ValidationError("stride must be at least 1");
  if (samples < spec.window_length) {
    throw ValidationError("frame of " + std::to_string(samples) +
                          " samples is shorter than window_length " +
                          std::to_string(spec.window_length));
  }
  return (samples - spec.window_length) / spec.stride + 1;
}

std::vector<TimeSeriesFrame> windows(const TimeSeriesFrame& frame, const WindowSpec& spec) {
  const long n = window_count(frame.samples(), spec);
  std::vector<TimeSeriesFrame> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long w = 0; w < n; ++w) {
    TimeSeriesFrame win;
    win.channels = frame.channels;
    win.sample_period = frame.sample_period;
    win.data = frame.data.middleRows(window_start(w, spec), spec.window_length);
    out.push_back(std::move(win));
  }
  return out;
}

TimeSeriesFrame concat(const std::vector<TimeSeriesFrame>& frames) {
  if (frames.empty()) throw ValidationError("concat of zero frames");
  long total = 0;
  for (const auto& f : frames) {
    if (f.channels != frames.front().channels) {
      throw ValidationError("concat: frames disagree on channel lists");
    }
    total += f.samples();
  }
  TimeSeriesFrame out;
  out.channels = frames.front().channels;
  out.sample_period = frames.front().sample_period;
  out.data.resize(total, frames.front().data.cols());
  long at = 0;
  for (const auto& f : frames) {
    out.data.middleRows(at, f.samples()) = f.data;
    at += f.samples();
  }
  return out;
}

}  // namespace stpn
