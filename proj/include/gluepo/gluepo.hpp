#pragma once

#include "gluepo/async_automata.hpp"
#include "gluepo/core_po.hpp"
#include "gluepo/cts.hpp"
#include "gluepo/cts_computation.hpp"
#include "gluepo/cts_witness.hpp"
#include "gluepo/dot.hpp"
#include "gluepo/model_io.hpp"
#include "gluepo/pti_computation.hpp"
#include "gluepo/pti_history.hpp"
#include "gluepo/pti_net.hpp"
#include "gluepo/pti_witness.hpp"
#include "gluepo/random_models.hpp"
#include "gluepo/serialize.hpp"
