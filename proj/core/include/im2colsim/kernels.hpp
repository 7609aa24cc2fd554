#pragma once

#include "im2colsim/conv_spec.hpp"
#include "im2colsim/tensor.hpp"

namespace im2colsim {

/// Reference convolution. `ifmap` holds N x C_I x H_I x W_I values (any rank-4
/// layout), `filters` holds C_O x C_I x H_F x W_F values (any rank-4 layout;
/// HWCN is the conventional one). Zero padding is virtual. Returns NHWC.
Tensor direct_conv(const Tensor& ifmap, const Tensor& filters,
                   const ConvSpec& spec);

/// C = A * B for row-major matrices.
Tensor gemm(const Tensor& a, const Tensor& b);

/// Same logical values under a new linearization.
Tensor relayout(const Tensor& t, Layout target);

/// Shapes a ConvSpec expects for the ifmap / filter tensors.
Shape4 ifmap_shape(const ConvSpec& spec);
Shape4 filter_shape(const ConvSpec& spec);
Shape4 ofmap_shape(const ConvSpec& spec);

}  // namespace im2colsim
