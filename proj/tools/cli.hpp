#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "susycs/analysis.hpp"
#include "susycs/kmatrix.hpp"

namespace susycs::cli {

/// Environment variable overriding the default Fock truncation cap.
inline constexpr const char* kMaxFockEnv = "SUSYCS_MAX_FOCK";
inline constexpr int kMaxFockLimit = 2000;

enum class ExitCode : int { Ok = 0, Usage = 1, Numerical = 2 };

/// Malformed command line (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json };

struct RunConfig {
  std::string command;
  std::optional<std::string> out_path;
  std::optional<Format> format;
  double tol = kDefaultClassifyTol;
  int max_fock = 200;
};

double parse_real(std::string_view text);
/// "re,im"
cplx parse_complex(std::string_view text);
/// "k1,k2,k3,k4" (real) or "re1,im1,...,re4,im4" (complex).
KMatrix parse_k(std::string_view text, double omega = 1.0);
/// "start:stop:count"
Range parse_range(std::string_view text);

/// Locale-independent rendering with 17 significant digits.
std::string format_real(double v);

/// Default cap from SUSYCS_MAX_FOCK when set and valid, else 200.
int default_max_fock();

/// Runs one subcommand. argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace susycs::cli
