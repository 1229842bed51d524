#include "mra/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace mra {

int SystemConfig::bits_per_symbol() const {
  int b = 0;
  int v = modem_order;
  while (v > 1) {
    v >>= 1;
    ++b;
  }
  return b;
}

double SystemConfig::noise_power_lin() const {
  return db_to_pow(noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz));
}

void SystemConfig::derive_code_dims() {
  coded_bits = data_len() * bits_per_symbol();
  block_bits = coded_bits / 2;
  payload_bits = block_bits - 8;
}

void SystemConfig::validate() const {
  std::vector<std::string> bad;
  auto check = [&bad](bool ok, const std::string& msg) {
    if (!ok) bad.push_back(msg);
  };
  check(n_users >= 1, "n_users must be >= 1");
  check(n_active >= 1 && n_active <= n_users, "require 1 <= n_active <= n_users");
  check(n_antennas >= n_active, "require n_antennas >= n_active");
  check(pilot_len >= 1, "pilot_len must be >= 1");
  check(frame_len > pilot_len, "frame_len must exceed pilot_len");
  check(modem_order == 4 || modem_order == 16, "modem_order must be 4 or 16");
  check(bandwidth_hz > 0, "bandwidth_hz must be positive");
  check(cell_radius_km > min_distance_km && min_distance_km > 0,
        "require 0 < min_distance_km < cell_radius_km");
  check(coded_bits == data_len() * bits_per_symbol(),
        "coded_bits must equal data_len * log2(modem_order)");
  check(block_bits == payload_bits + 8, "block_bits must equal payload_bits + 8");
  check(coded_bits == 2 * block_bits, "code rate must be 1/2 (coded_bits = 2 * block_bits)");
  check(payload_bits >= 1, "payload_bits must be >= 1");
  check(theta >= 0.0 && theta <= 1.0, "theta must be in [0,1]");
  check(kappa >= 0.0 && kappa <= 1.0, "kappa must be in [0,1]");
  check(kappa1 >= 0.0 && kappa1 <= 1.0, "kappa1 must be in [0,1]");
  check(kappa2 >= 0.0 && kappa2 <= 1.0, "kappa2 must be in [0,1]");
  check(q1 >= 1 && q2 >= 1 && q3 >= 1, "iteration caps q1,q2,q3 must be >= 1");
  check(eps1 > 0 && eps2 > 0 && eps3 > 0, "tolerances eps1..eps3 must be positive");
  check(damping > 0.0 && damping <= 1.0, "damping must be in (0,1]");
  check(max_bp_iters >= 1, "max_bp_iters must be >= 1");
  if (!bad.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& m : bad) msg += "\n  - " + m;
    throw config_error(msg);
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw config_error("cannot parse boolean value '" + v + "'");
}

}  // namespace

void SystemConfig::apply_key_value(const std::string& key, const std::string& value) {
  try {
    if (key == "n_users") n_users = std::stoi(value);
    else if (key == "n_antennas") n_antennas = std::stoi(value);
    else if (key == "n_active") n_active = std::stoi(value);
    else if (key == "pilot_len") pilot_len = std::stoi(value);
    else if (key == "frame_len") frame_len = std::stoi(value);
    else if (key == "tx_power_dbm") tx_power_dbm = std::stod(value);
    else if (key == "noise_density_dbm_hz") noise_density_dbm_hz = std::stod(value);
    else if (key == "bandwidth_hz") bandwidth_hz = std::stod(value);
    else if (key == "cell_radius_km") cell_radius_km = std::stod(value);
    else if (key == "min_distance_km") min_distance_km = std::stod(value);
    else if (key == "payload_bits") payload_bits = std::stoi(value);
    else if (key == "block_bits") block_bits = std::stoi(value);
    else if (key == "coded_bits") coded_bits = std::stoi(value);
    else if (key == "modem_order") modem_order = std::stoi(value);
    else if (key == "max_bp_iters") max_bp_iters = std::stoi(value);
    else if (key == "theta") theta = std::stod(value);
    else if (key == "eps1") eps1 = std::stod(value);
    else if (key == "eps2") eps2 = std::stod(value);
    else if (key == "eps3") eps3 = std::stod(value);
    else if (key == "q1") q1 = std::stoi(value);
    else if (key == "q2") q2 = std::stoi(value);
    else if (key == "q3") q3 = std::stoi(value);
    else if (key == "damping") damping = std::stod(value);
    else if (key == "kappa") kappa = std::stod(value);
    else if (key == "kappa1") kappa1 = std::stod(value);
    else if (key == "kappa2") kappa2 = std::stod(value);
    else if (key == "seed") rng_seed = std::stoull(value);
    else if (key == "first_k_active") first_k_active = parse_bool(value);
    else if (key == "rho_bar_symbol_scaling") rho_bar_symbol_scaling = parse_bool(value);
    else throw config_error("unknown configuration key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw config_error("cannot parse value '" + value + "' for key '" + key + "'");
  } catch (const std::out_of_range&) {
    throw config_error("value '" + value + "' out of range for key '" + key + "'");
  }
}

SystemConfig SystemConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  SystemConfig cfg;
  bool dims_given = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "payload_bits" || key == "block_bits" || key == "coded_bits") dims_given = true;
    cfg.apply_key_value(key, value);
  }
  if (!dims_given) cfg.derive_code_dims();
  return cfg;
}

std::map<std::string, std::string> SystemConfig::to_key_values() const {
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  return {
      {"n_users", std::to_string(n_users)},
      {"n_antennas", std::to_string(n_antennas)},
      {"n_active", std::to_string(n_active)},
      {"pilot_len", std::to_string(pilot_len)},
      {"frame_len", std::to_string(frame_len)},
      {"tx_power_dbm", fmt(tx_power_dbm)},
      {"noise_density_dbm_hz", fmt(noise_density_dbm_hz)},
      {"bandwidth_hz", fmt(bandwidth_hz)},
      {"cell_radius_km", fmt(cell_radius_km)},
      {"min_distance_km", fmt(min_distance_km)},
      {"payload_bits", std::to_string(payload_bits)},
      {"block_bits", std::to_string(block_bits)},
      {"coded_bits", std::to_string(coded_bits)},
      {"modem_order", std::to_string(modem_order)},
      {"max_bp_iters", std::to_string(max_bp_iters)},
      {"theta", fmt(theta)},
      {"eps1", fmt(eps1)},
      {"eps2", fmt(eps2)},
      {"eps3", fmt(eps3)},
      {"q1", std::to_string(q1)},
      {"q2", std::to_string(q2)},
      {"q3", std::to_string(q3)},
      {"damping", fmt(damping)},
      {"kappa", fmt(kappa)},
      {"kappa1", fmt(kappa1)},
      {"kappa2", fmt(kappa2)},
      {"seed", std::to_string(rng_seed)},
      {"first_k_active", first_k_active ? "true" : "false"},
      {"rho_bar_symbol_scaling", rho_bar_symbol_scaling ? "true" : "false"},
  };
}

}  // namespace mra
