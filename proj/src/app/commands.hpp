// commands.hpp: one function per CLI subcommand. Each returns an exit code
// and queues its artifacts on the session; the caller flushes them.
#pragma once

#include "session.hpp"

#include "sasc/model.hpp"
#include "sasc/table.hpp"

#include <string>
#include <vector>

namespace sasc::app {

// Throws InstabilityError naming `what` unless the model is stable.
void require_stable(const SystemModel& model, const std::string& what);

// Transmission and output-spectrum columns over the omega grid, one set per
// sweep value. `only` restricts the columns kept (before suffixing).
SpectrumTable spectrum_table(Session& s, const std::vector<std::string>& only = {});

int cmd_spectrum(Session& s);
int cmd_asymmetry(Session& s);
int cmd_snr(Session& s, const std::string& name = "snr");
int cmd_fmap(Session& s);
int cmd_chain(Session& s);
int cmd_oracle(Session& s);
int cmd_optimize(Session& s);
int cmd_figure(Session& s, const std::string& which);

}  // namespace sasc::app
