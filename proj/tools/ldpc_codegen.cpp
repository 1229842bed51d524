// Regenerates a parity-check matrix data file. The construction itself is
// deterministic (fixed base seed, 100-candidate scan, fewest 4-cycles wins),
// so this tool only exists to materialize/refresh the shipped alist files.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mra/ldpc.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a regular LDPC parity-check matrix in alist format"};
  int n = 300, var_deg = 3, check_deg = 6;
  std::string out = "ldpc_300_150.alist";
  app.add_option("--n", n, "Codeword length")->capture_default_str();
  app.add_option("--var-deg", var_deg, "Variable node degree")->capture_default_str();
  app.add_option("--check-deg", check_deg, "Check node degree")->capture_default_str();
  app.add_option("--out", out, "Output alist path")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto code = mra::phy::LdpcCode::generate(n, var_deg, check_deg);
    code.write_alist(out);
    std::cout << "n=" << code.n() << " checks=" << code.n_checks() << " k=" << code.k()
              << " four_cycles=" << code.four_cycles()
              << " candidate_seed=" << code.construction_seed() << "\nwrote " << out << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
