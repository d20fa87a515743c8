#pragma once

// Umbrella header.

#include "gridswitch/branch_flow.hpp"
#include "gridswitch/dc_sensitivity.hpp"
#include "gridswitch/error.hpp"
#include "gridswitch/matpower.hpp"
#include "gridswitch/network.hpp"
#include "gridswitch/parallel.hpp"
#include "gridswitch/pipeline.hpp"
#include "gridswitch/power_flow.hpp"
#include "gridswitch/report.hpp"
#include "gridswitch/rtca.hpp"
#include "gridswitch/tntc.hpp"
#include "gridswitch/topology.hpp"
#include "gridswitch/validation.hpp"
#include "gridswitch/ybus.hpp"
