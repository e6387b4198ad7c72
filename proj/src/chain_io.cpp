#include "gen3lite/chain_io.hpp"

#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gen3lite {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

template <int N>
Eigen::Matrix<double, N, 1> read_vector(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw std::invalid_argument(std::string("chain: missing key '") + key + "'");
  const auto& arr = doc.at(key);
  if (!arr.is_array() || arr.size() != N)
    throw std::invalid_argument(std::string("chain: '") + key + "' must be an array of " +
                                std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) {
    if (!arr[static_cast<std::size_t>(i)].is_number())
      throw std::invalid_argument(std::string("chain: '") + key + "' has a non-numeric entry");
    out[i] = arr[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

template <typename Vec>
nlohmann::json to_array(const Vec& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

DhChaind chain_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("chain: document must be a JSON object");
  DhChaind chain;
  chain.a = read_vector<6>(doc, "a");
  chain.b = read_vector<6>(doc, "b");
  chain.alpha = read_vector<6>(doc, "alpha");
  chain.lower = read_vector<6>(doc, "lower_deg") * kDeg;
  chain.upper = read_vector<6>(doc, "upper_deg") * kDeg;
  if (doc.contains("offset_deg")) chain.offset = read_vector<6>(doc, "offset_deg") * kDeg;
  if (doc.contains("base")) chain.base = read_vector<3>(doc, "base");
  chain.validate();
  return chain;
}

nlohmann::json chain_to_json(const DhChaind& chain) {
  return {
      {"a", to_array(chain.a)},
      {"b", to_array(chain.b)},
      {"alpha", to_array(chain.alpha)},
      {"lower_deg", to_array(chain.lower / kDeg)},
      {"upper_deg", to_array(chain.upper / kDeg)},
      {"offset_deg", to_array(chain.offset / kDeg)},
      {"base", to_array(chain.base)},
  };
}

DhChaind load_chain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("chain: cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("chain: " + path.string() + ": " + e.what());
  }
  return chain_from_json(doc);
}

}  // namespace gen3lite
