/// 256-entry false-color table used for risk-map renders.
///
/// Piecewise-linear through the anchors (index: r,g,b)
/// 0: 0,0,0 / 51: 0,0,255 / 102: 0,200,255 / 153: 255,255,0 / 204: 255,64,0 / 255: 128,0,0.
/// Index 0 is black.
pub const RISK_COLORMAP: [[u8; 3]; 256] = [
    [0, 0, 0],
    [0, 0, 5],
    [0, 0, 10],
    [0, 0, 15],
    [0, 0, 20],
    [0, 0, 25],
    [0, 0, 30],
    [0, 0, 35],
    [0, 0, 40],
    [0, 0, 45],
    [0, 0, 50],
    [0, 0, 55],
    [0, 0, 60],
    [0, 0, 65],
    [0, 0, 70],
    [0, 0, 75],
    [0, 0, 80],
    [0, 0, 85],
    [0, 0, 90],
    [0, 0, 95],
    [0, 0, 100],
    [0, 0, 105],
    [0, 0, 110],
    [0, 0, 115],
    [0, 0, 120],
    [0, 0, 125],
    [0, 0, 130],
    [0, 0, 135],
    [0, 0, 140],
    [0, 0, 145],
    [0, 0, 150],
    [0, 0, 155],
    [0, 0, 160],
    [0, 0, 165],
    [0, 0, 170],
    [0, 0, 175],
    [0, 0, 180],
    [0, 0, 185],
    [0, 0, 190],
    [0, 0, 195],
    [0, 0, 200],
    [0, 0, 205],
    [0, 0, 210],
    [0, 0, 215],
    [0, 0, 220],
    [0, 0, 225],
    [0, 0, 230],
    [0, 0, 235],
    [0, 0, 240],
    [0, 0, 245],
    [0, 0, 250],
    [0, 0, 255],
    [0, 4, 255],
    [0, 8, 255],
    [0, 12, 255],
    [0, 16, 255],
    [0, 20, 255],
    [0, 24, 255],
    [0, 27, 255],
    [0, 31, 255],
    [0, 35, 255],
    [0, 39, 255],
    [0, 43, 255],
    [0, 47, 255],
    [0, 51, 255],
    [0, 55, 255],
    [0, 59, 255],
    [0, 63, 255],
    [0, 67, 255],
    [0, 71, 255],
    [0, 75, 255],
    [0, 78, 255],
    [0, 82, 255],
    [0, 86, 255],
    [0, 90, 255],
    [0, 94, 255],
    [0, 98, 255],
    [0, 102, 255],
    [0, 106, 255],
    [0, 110, 255],
    [0, 114, 255],
    [0, 118, 255],
    [0, 122, 255],
    [0, 125, 255],
    [0, 129, 255],
    [0, 133, 255],
    [0, 137, 255],
    [0, 141, 255],
    [0, 145, 255],
    [0, 149, 255],
    [0, 153, 255],
    [0, 157, 255],
    [0, 161, 255],
    [0, 165, 255],
    [0, 169, 255],
    [0, 173, 255],
    [0, 176, 255],
    [0, 180, 255],
    [0, 184, 255],
    [0, 188, 255],
    [0, 192, 255],
    [0, 196, 255],
    [0, 200, 255],
    [5, 201, 250],
    [10, 202, 245],
    [15, 203, 240],
    [20, 204, 235],
    [25, 205, 230],
    [30, 206, 225],
    [35, 208, 220],
    [40, 209, 215],
    [45, 210, 210],
    [50, 211, 205],
    [55, 212, 200],
    [60, 213, 195],
    [65, 214, 190],
    [70, 215, 185],
    [75, 216, 180],
    [80, 217, 175],
    [85, 218, 170],
    [90, 219, 165],
    [95, 220, 160],
    [100, 222, 155],
    [105, 223, 150],
    [110, 224, 145],
    [115, 225, 140],
    [120, 226, 135],
    [125, 227, 130],
    [130, 228, 125],
    [135, 229, 120],
    [140, 230, 115],
    [145, 231, 110],
    [150, 232, 105],
    [155, 233, 100],
    [160, 235, 95],
    [165, 236, 90],
    [170, 237, 85],
    [175, 238, 80],
    [180, 239, 75],
    [185, 240, 70],
    [190, 241, 65],
    [195, 242, 60],
    [200, 243, 55],
    [205, 244, 50],
    [210, 245, 45],
    [215, 246, 40],
    [220, 247, 35],
    [225, 249, 30],
    [230, 250, 25],
    [235, 251, 20],
    [240, 252, 15],
    [245, 253, 10],
    [250, 254, 5],
    [255, 255, 0],
    [255, 251, 0],
    [255, 248, 0],
    [255, 244, 0],
    [255, 240, 0],
    [255, 236, 0],
    [255, 233, 0],
    [255, 229, 0],
    [255, 225, 0],
    [255, 221, 0],
    [255, 218, 0],
    [255, 214, 0],
    [255, 210, 0],
    [255, 206, 0],
    [255, 203, 0],
    [255, 199, 0],
    [255, 195, 0],
    [255, 191, 0],
    [255, 188, 0],
    [255, 184, 0],
    [255, 180, 0],
    [255, 176, 0],
    [255, 173, 0],
    [255, 169, 0],
    [255, 165, 0],
    [255, 161, 0],
    [255, 158, 0],
    [255, 154, 0],
    [255, 150, 0],
    [255, 146, 0],
    [255, 143, 0],
    [255, 139, 0],
    [255, 135, 0],
    [255, 131, 0],
    [255, 128, 0],
    [255, 124, 0],
    [255, 120, 0],
    [255, 116, 0],
    [255, 113, 0],
    [255, 109, 0],
    [255, 105, 0],
    [255, 101, 0],
    [255, 98, 0],
    [255, 94, 0],
    [255, 90, 0],
    [255, 86, 0],
    [255, 83, 0],
    [255, 79, 0],
    [255, 75, 0],
    [255, 71, 0],
    [255, 68, 0],
    [255, 64, 0],
    [253, 63, 0],
    [250, 61, 0],
    [248, 60, 0],
    [245, 59, 0],
    [243, 58, 0],
    [240, 56, 0],
    [238, 55, 0],
    [235, 54, 0],
    [233, 53, 0],
    [230, 51, 0],
    [228, 50, 0],
    [225, 49, 0],
    [223, 48, 0],
    [220, 46, 0],
    [218, 45, 0],
    [215, 44, 0],
    [213, 43, 0],
    [210, 41, 0],
    [208, 40, 0],
    [205, 39, 0],
    [203, 38, 0],
    [200, 36, 0],
    [198, 35, 0],
    [195, 34, 0],
    [193, 33, 0],
    [190, 31, 0],
    [188, 30, 0],
    [185, 29, 0],
    [183, 28, 0],
    [180, 26, 0],
    [178, 25, 0],
    [175, 24, 0],
    [173, 23, 0],
    [170, 21, 0],
    [168, 20, 0],
    [165, 19, 0],
    [163, 18, 0],
    [160, 16, 0],
    [158, 15, 0],
    [155, 14, 0],
    [153, 13, 0],
    [150, 11, 0],
    [148, 10, 0],
    [145, 9, 0],
    [143, 8, 0],
    [140, 6, 0],
    [138, 5, 0],
    [135, 4, 0],
    [133, 3, 0],
    [130, 1, 0],
    [128, 0, 0],
];
