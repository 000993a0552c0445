#include "migsim/presets.hpp"

#include <map>
#include <stdexcept>

namespace migsim {

namespace {

// Kernel amplitudes are chosen so the L1 masses come out round:
// tophat radius 0.5 has area pi/4, gaussian sigma s has mass 2 pi s^2 amp.

const char* kNoninteracting = R"(# Pure immigration-emigration balance; no interactions.
[model]
dimension = 2
side = 20.0

[model.a_plus]
family = "tophat"
amplitude = 0.0
radius = 0.5

[model.a_minus]
family = "tophat"
amplitude = 0.0
radius = 0.5

[model.b_plus]
level = 0.25

[model.b_minus]
level = 1.0

[run]
t_end = 20.0
snapshot_times = [0.0, 5.0, 10.0, 20.0]
replicates = 1000
seed = 20260821
init = "empty"

[analysis]
probe_boxes = [5.0, 5.0, 15.0, 15.0]

[kinetic]
nodes = 64
dt = 0.01
)";

const char* kContact = R"(# Branching with no direct competition: offspring pile up in clusters.
[model]
dimension = 2
side = 20.0

[model.a_plus]
family = "gaussian"
amplitude = 1.768388256576615
scale = 0.3

[model.a_minus]
family = "gaussian"
amplitude = 0.0
scale = 0.3

[model.b_plus]
level = 0.0

[model.b_minus]
level = 0.5

[run]
t_end = 6.0
snapshot_times = [0.0, 2.0, 4.0, 6.0]
replicates = 400
seed = 1718020
init = "poisson"
init_kappa = 0.05

[analysis]
probe_boxes = [5.0, 5.0, 15.0, 15.0]

[kinetic]
nodes = 64
dt = 0.01
)";

const char* kBolkerPacala = R"(# Local dispersal against wider competition; density saturates.
[model]
dimension = 2
side = 12.0

[model.a_plus]
family = "tophat"
amplitude = 1.2732395447351628
radius = 0.5

[model.a_minus]
family = "gaussian"
amplitude = 0.07957747154594767
scale = 1.0

[model.b_plus]
level = 0.0

[model.b_minus]
level = 0.2

[run]
t_end = 20.0
snapshot_times = [0.0, 5.0, 10.0, 20.0]
replicates = 300
seed = 90210
init = "poisson"
init_kappa = 1.0

[analysis]
probe_boxes = [3.0, 3.0, 9.0, 9.0]

[kinetic]
nodes = 64
dt = 0.01
)";

const char* kFullLong = R"(# All four mechanisms; competition reaches past attraction.
[model]
dimension = 2
side = 16.0

[model.a_plus]
family = "tophat"
amplitude = 0.6366197723675814
radius = 0.5

[model.a_minus]
family = "gaussian"
amplitude = 0.15915494309189535
scale = 1.0

[model.b_plus]
level = 0.1

[model.b_minus]
level = 0.2

[run]
t_end = 20.0
snapshot_times = [0.0, 1.0, 5.0, 20.0]
replicates = 500
seed = 424242
init = "poisson"
init_kappa = 0.5

[analysis]
probe_boxes = [4.0, 4.0, 12.0, 12.0]

[kinetic]
nodes = 64
dt = 0.01
)";

const char* kFullShort = R"(# All four mechanisms; attraction reaches past competition.
[model]
dimension = 2
side = 16.0

[model.a_plus]
family = "gaussian"
amplitude = 0.07957747154594767
scale = 1.0

[model.a_minus]
family = "tophat"
amplitude = 1.2732395447351628
radius = 0.5

[model.b_plus]
level = 0.1

[model.b_minus]
level = 0.2

[run]
t_end = 20.0
snapshot_times = [0.0, 1.0, 5.0, 20.0]
replicates = 500
seed = 434343
init = "poisson"
init_kappa = 0.5

[analysis]
probe_boxes = [4.0, 4.0, 12.0, 12.0]

[kinetic]
nodes = 64
dt = 0.01
)";

const char* kExtinction = R"(# Emigration pressure dominates the attraction mass; populations die out.
[model]
dimension = 2
side = 16.0

[model.a_plus]
family = "tophat"
amplitude = 0.6366197723675814
radius = 0.5

[model.a_minus]
family = "gaussian"
amplitude = 0.07957747154594767
scale = 1.0

[model.b_plus]
level = 0.0

[model.b_minus]
level = 1.0

[run]
t_end = 10.0
snapshot_times = [0.0, 2.5, 5.0, 10.0]
replicates = 200
seed = 777001
init = "poisson"
init_kappa = 0.5

[analysis]
probe_boxes = [4.0, 4.0, 12.0, 12.0]

[kinetic]
nodes = 64
dt = 0.01
)";

const std::map<std::string, std::string>& table() {
  static const std::map<std::string, std::string> presets = {
      {"noninteracting", kNoninteracting},
      {"contact", kContact},
      {"bolker-pacala", kBolkerPacala},
      {"full-long", kFullLong},
      {"full-short", kFullShort},
      {"extinction", kExtinction},
  };
  return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : table()) {
    (void)text;
    names.push_back(name);
  }
  return names;
}

bool is_preset(const std::string& name) { return table().count(name) != 0; }

const std::string& preset_toml(const std::string& name) {
  const auto it = table().find(name);
  if (it == table().end()) {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return it->second;
}

}  // namespace migsim
