#ifndef BLACKOUT_IO_HPP
#define BLACKOUT_IO_HPP

#include <string>
#include <vector>

#include "blackout/predictor.hpp"
#include "blackout/pure_death.hpp"

namespace blackout {

// Dataset file: header "BDDATA M=<int> N=<int>", then one item per line as
// space-separated integers, with an optional trailing weight after "|".
DiscreteDataset load_dataset(const std::string& path);
void save_dataset(const DiscreteDataset& ds, const std::string& path);

// Sample file: header "BDSAMPLES M=<int> N=<int> COUNT=<int>", then one
// sample per line as space-separated integers.
void save_samples(const std::vector<std::vector<int>>& samples,
                  const StateSpace& space, const std::string& path);
std::pair<StateSpace, std::vector<std::vector<int>>> load_samples(
    const std::string& path);

// P2 (plain) PGM export; requires dims to be a perfect square.
void save_pgm(const std::vector<int>& sample, const StateSpace& space,
              const std::string& path);

}  // namespace blackout

#endif
