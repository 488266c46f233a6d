#pragma once

#include "meshdenoise/mesh.hpp"
#include "meshdenoise/mesh_io.hpp"
#include "meshdenoise/metrics.hpp"
#include "meshdenoise/neighborhood.hpp"
#include "meshdenoise/noise.hpp"
#include "meshdenoise/normal_filter.hpp"
#include "meshdenoise/pipeline.hpp"
#include "meshdenoise/vertex_update.hpp"
