#pragma once

#include <memory>

#include "coldcc/scatter.hpp"
#include "coldcc/units.hpp"

namespace fixtures {

inline double collision_mass() {
  return coldcc::units::reduced_mass(coldcc::units::kMassHelium3, 2.0 * coldcc::units::kMassOxygen17);
}

struct Problem {
  coldcc::molecule::DiatomModel model = coldcc::molecule::default_oxygen17_model();
  std::shared_ptr<coldcc::molecule::MolecularStructure> structure;
  std::shared_ptr<coldcc::pes::VibronicCouplingTable> table;
  std::unique_ptr<coldcc::scatter::ScatteringProblem> problem;
};

inline Problem make_problem(coldcc::molecule::RotorMode mode, coldcc::scatter::ScatteringSettings settings = {},
                            coldcc::molecule::LevelLimits limits = {}, double lambda = 1.0) {
  using namespace coldcc;
  Problem p;
  p.structure = std::make_shared<molecule::MolecularStructure>(molecule::molecular_levels(p.model, limits, mode));
  const auto surface = pes::InteractionSurface::model(pes::default_model_parameters()).scaled(lambda);
  p.table = std::make_shared<pes::VibronicCouplingTable>(pes::vibrational_average(surface, *p.structure, p.model));
  if (settings.reduced_mass_amu == 0.0) settings.reduced_mass_amu = collision_mass();
  p.problem = std::make_unique<scatter::ScatteringProblem>(p.structure, p.table, settings);
  return p;
}

}  // namespace fixtures
