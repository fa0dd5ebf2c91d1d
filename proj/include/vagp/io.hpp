#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vagp/pauli.hpp"
#include "vagp/vagp.hpp"

namespace vagp::io {

/// Raised for any failure to create or write an output artifact.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip-safe text with 17 significant digits, locale independent.
std::string format_double(double x);

/// Comma-separated writer; numbers go through format_double.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(const std::string& s);
  void end_row();
  void close();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::string row_;
  bool first_ = true;
};

/// Terms as a list of {word, coeff_re, coeff_im}.
nlohmann::json to_json(const TransOp& op);
TransOp transop_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AnsatzBasis& basis);
/// {h, g, k, phi, coeffs: [{word, value}], norm_sq, residual}.
nlohmann::json to_json(const VagpSolution& sol);
nlohmann::json to_json(const OptimalDirection& dir);

/// Writes `config` plus a version stamp to dir/metadata.json.
void write_metadata(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config,
                    const nlohmann::json& extra = nlohmann::json::object());

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Creates the directory (and parents) or throws IoError.
void ensure_directory(const std::filesystem::path& dir);

const char* version();

}  // namespace vagp::io
