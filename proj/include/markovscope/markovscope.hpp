#pragma once

// Umbrella header: random-unitary qubit dephasing maps, transfer/Choi
// representations, CP-divisibility certification, channel fidelity scans,
// and the experiment driver behind the markov-scope CLI.

#include "markovscope/channel.hpp"
#include "markovscope/complex_matrix.hpp"
#include "markovscope/config.hpp"
#include "markovscope/divisibility.hpp"
#include "markovscope/experiment.hpp"
#include "markovscope/fidelity.hpp"
#include "markovscope/linalg.hpp"
#include "markovscope/parallel.hpp"
#include "markovscope/transfer.hpp"
