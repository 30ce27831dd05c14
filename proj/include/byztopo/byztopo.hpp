#pragma once

#include "byztopo/node_id.hpp"
#include "byztopo/topology.hpp"
#include "byztopo/connectivity.hpp"
#include "byztopo/explored_view.hpp"
#include "byztopo/generators.hpp"
#include "byztopo/messages.hpp"
#include "byztopo/detector.hpp"
#include "byztopo/explorer.hpp"
#include "byztopo/composer.hpp"
#include "byztopo/adversary.hpp"
#include "byztopo/world.hpp"
#include "byztopo/audit.hpp"
#include "byztopo/runtime.hpp"
#include "byztopo/report.hpp"
#include "byztopo/scenario.hpp"
