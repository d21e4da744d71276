// Copyright The phred Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "phred/core/errors.hpp"
#include "phred/core/interpolation_data.hpp"
#include "phred/core/linalg.hpp"
#include "phred/core/parallel.hpp"
#include "phred/core/port_hamiltonian.hpp"
#include "phred/core/state_space.hpp"
#include "phred/core/transfer.hpp"
#include "phred/core/types.hpp"

#include "phred/reduction/ph_reduce.hpp"
#include "phred/reduction/tangential.hpp"

#include "phred/irka/certificates.hpp"
#include "phred/irka/init.hpp"
#include "phred/irka/irka.hpp"
#include "phred/irka/modal.hpp"

#include "phred/balancing/balancing.hpp"
#include "phred/balancing/lyapunov.hpp"

#include "phred/analysis/frequency.hpp"
#include "phred/analysis/harness.hpp"
#include "phred/analysis/norms.hpp"
#include "phred/analysis/simulate.hpp"

#include "phred/models/benchmarks.hpp"

#include "phred/io/matrix_market.hpp"
#include "phred/io/model_files.hpp"
#include "phred/io/report.hpp"
