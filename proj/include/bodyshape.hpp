#pragma once

// Core library: no dependencies beyond the standard library.
#include <bodyshape/anthropometry.hpp>
#include <bodyshape/body_shape.hpp>
#include <bodyshape/classifier.hpp>
#include <bodyshape/error.hpp>
#include <bodyshape/evaluation.hpp>
#include <bodyshape/image.hpp>
#include <bodyshape/inference.hpp>
#include <bodyshape/keypoints.hpp>
#include <bodyshape/manifest.hpp>
#include <bodyshape/pipeline.hpp>
#include <bodyshape/raster.hpp>
#include <bodyshape/silhouette.hpp>
#include <bodyshape/synth.hpp>
