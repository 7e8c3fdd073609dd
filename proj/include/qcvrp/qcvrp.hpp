#pragma once

#include "bench.hpp"
#include "error.hpp"
#include "flow_model.hpp"
#include "instance.hpp"
#include "qubo.hpp"
#include "routes.hpp"
#include "samplers.hpp"
