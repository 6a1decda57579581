#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace lwb::test {

std::filesystem::path sample_path(const std::string& rel) { return std::filesystem::path(LWB_SAMPLES_DIR) / rel; }

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {
std::string render(const Diagnostics& d) {
  std::ostringstream os;
  d.print(os);
  return os.str();
}
}  // namespace

ComponentPtr component_from_text(const std::string& grammar, std::vector<std::string> start, int k) {
  auto g = parse_grammar(grammar, "<test>");
  if (!g) throw std::runtime_error("grammar: " + render(g.diags));
  ComponentOptions o;
  o.startRules = std::move(start);
  o.k = k;
  auto c = build_component(link_single(*g), std::move(o));
  if (!c) throw std::runtime_error("component: " + render(c.diags));
  return *c;
}

ComponentPtr component_from_sample(const std::string& file, std::vector<std::string> start, int k) {
  auto g = load_grammar_file(sample_path("grammars/" + file));
  if (!g) throw std::runtime_error("grammar: " + render(g.diags));
  ComponentOptions o;
  o.startRules = std::move(start);
  o.k = k;
  auto c = build_component(link_single(*g), std::move(o));
  if (!c) throw std::runtime_error("component: " + render(c.diags));
  return *c;
}

Composition composition_from_sample(const std::string& config) {
  auto cfg = load_composition_config(sample_path("compositions/" + config));
  if (!cfg) throw std::runtime_error("config: " + render(cfg.diags));
  auto comp = compose(*cfg);
  if (!comp) throw std::runtime_error("compose: " + render(comp.diags));
  return std::move(*comp.value);
}

std::filesystem::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto p = std::filesystem::temp_directory_path() / ("lwb-" + tag + "-" + std::to_string(rng()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace lwb::test
