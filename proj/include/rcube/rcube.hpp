#pragma once

// Umbrella header for the radar cube toolkit: FMCW frame synthesis, the
// range/velocity/angle transform chain, spectrum-domain augmentation,
// confidence-map losses and metrics, and convolutional cost accounting.

#include "rcube/common.hpp"
#include "rcube/tensor.hpp"
#include "rcube/fft.hpp"
#include "rcube/config.hpp"
#include "rcube/scene.hpp"
#include "rcube/synth.hpp"
#include "rcube/pipeline.hpp"
#include "rcube/augment.hpp"
#include "rcube/fusion_loss.hpp"
#include "rcube/eval.hpp"
#include "rcube/complexity.hpp"
#include "rcube/rcube_io.hpp"
#include "rcube/render.hpp"
