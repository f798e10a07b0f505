// Rows of the 52-sample slope corpus, in published order.
// Columns: gamma, c, phi, beta, H, ru, S, FS, computed S, computed FS.
use super::TableRow;

#[rustfmt::skip]
pub(super) const TABLE: [TableRow; 52] = [
    TableRow { features: [18.80, 14.40, 25.02, 19.98, 30.6, 0.0], status: 1, fs: 1.876, computed_status: -1, computed_fs: 1.473 },
    TableRow { features: [18.77, 30.01, 9.99, 25.02, 50.0, 0.1], status: 1, fs: 1.400, computed_status: 1, computed_fs: 1.313 },
    TableRow { features: [19.97, 19.96, 36.0, 45.0, 50.0, 0.5], status: -1, fs: 0.829, computed_status: -1, computed_fs: 0.963 },
    TableRow { features: [22.38, 10.05, 35.01, 45.0, 10.0, 0.4], status: -1, fs: 0.901, computed_status: -1, computed_fs: 0.890 },
    TableRow { features: [18.77, 30.01, 19.98, 30.0, 50.0, 0.1], status: 1, fs: 1.460, computed_status: 1, computed_fs: 1.359 },
    TableRow { features: [28.40, 39.16, 37.98, 34.98, 100.0, 0.0], status: 1, fs: 1.989, computed_status: 1, computed_fs: 2.000 },
    TableRow { features: [19.97, 10.05, 28.98, 34.03, 6.0, 0.3], status: 1, fs: 1.340, computed_status: 1, computed_fs: 1.257 },
    TableRow { features: [13.97, 12.00, 26.01, 30.0, 88.0, 0.0], status: -1, fs: 1.021, computed_status: -1, computed_fs: 0.848 },
    TableRow { features: [18.77, 25.06, 19.98, 30.0, 50.0, 0.2], status: -1, fs: 1.210, computed_status: -1, computed_fs: 1.213 },
    TableRow { features: [18.83, 10.35, 21.29, 34.03, 37.0, 0.3], status: -1, fs: 1.289, computed_status: -1, computed_fs: 1.227 },
    TableRow { features: [28.40, 29.41, 35.01, 34.98, 100.0, 0.0], status: 1, fs: 1.781, computed_status: 1, computed_fs: 1.673 },
    TableRow { features: [18.77, 25.06, 9.99, 25.02, 50.0, 0.2], status: -1, fs: 1.180, computed_status: -1, computed_fs: 1.173 },
    TableRow { features: [16.47, 11.55, 0.0, 30.0, 3.6, 0.0], status: -1, fs: 1.000, computed_status: -1, computed_fs: 0.982 },
    TableRow { features: [20.56, 16.21, 26.51, 30.0, 40.0, 0.0], status: -1, fs: 1.250, computed_status: -1, computed_fs: 1.199 },
    TableRow { features: [18.66, 26.41, 14.99, 34.98, 8.2, 0.0], status: -1, fs: 1.111, computed_status: -1, computed_fs: 1.154 },
    TableRow { features: [13.97, 12.00, 26.01, 30.0, 88.0, 0.5], status: -1, fs: 0.626, computed_status: -1, computed_fs: 0.848 },
    TableRow { features: [25.96, 150.1, 45.0, 49.98, 200.0, 0.0], status: 1, fs: 1.199, computed_status: 1, computed_fs: 1.271 },
    TableRow { features: [18.46, 25.06, 0.0, 30.0, 6.0, 0.0], status: -1, fs: 1.090, computed_status: -1, computed_fs: 1.059 },
    TableRow { features: [19.97, 40.06, 30.02, 30.0, 15.0, 0.3], status: 1, fs: 1.841, computed_status: 1, computed_fs: 1.956 },
    TableRow { features: [20.39, 24.91, 13.01, 22.0, 10.6, 0.4], status: 1, fs: 1.400, computed_status: 1, computed_fs: 1.439 },
    TableRow { features: [19.60, 12.00, 19.98, 22.0, 12.2, 0.4], status: -1, fs: 1.349, computed_status: -1, computed_fs: 1.341 },
    TableRow { features: [20.96, 19.96, 40.01, 40.02, 12.0, 0.0], status: 1, fs: 1.841, computed_status: 1, computed_fs: 1.786 },
    TableRow { features: [17.98, 24.01, 30.15, 45.0, 20.0, 0.1], status: -1, fs: 1.120, computed_status: -1, computed_fs: 1.205 },
    TableRow { features: [20.96, 45.02, 25.02, 49.03, 12.0, 0.3], status: 1, fs: 1.529, computed_status: 1, computed_fs: 1.502 },
    TableRow { features: [22.38, 99.93, 45.0, 45.0, 15.0, 0.3], status: 1, fs: 1.799, computed_status: 1, computed_fs: 1.838 },
    TableRow { features: [18.77, 19.96, 19.98, 30.0, 50.0, 0.3], status: -1, fs: 1.000, computed_status: -1, computed_fs: 1.072 },
    TableRow { features: [21.78, 8.55, 32.0, 27.98, 12.8, 0.5], status: -1, fs: 1.030, computed_status: -1, computed_fs: 1.151 },
    TableRow { features: [21.47, 6.90, 30.02, 31.01, 76.8, 0.4], status: -1, fs: 1.009, computed_status: -1, computed_fs: 1.007 },
    TableRow { features: [21.98, 19.96, 22.01, 19.98, 180.0, 0.1], status: -1, fs: 0.991, computed_status: -1, computed_fs: 1.006 },
    TableRow { features: [18.80, 57.47, 19.98, 19.98, 30.6, 0.0], status: 1, fs: 2.044, computed_status: 1, computed_fs: 1.930 },
    TableRow { features: [21.36, 10.05, 30.33, 30.0, 20.0, 0.0], status: 1, fs: 1.700, computed_status: 1, computed_fs: 1.572 },
    TableRow { features: [18.80, 14.40, 25.02, 19.98, 30.6, 0.5], status: -1, fs: 1.111, computed_status: -1, computed_fs: 1.473 },
    TableRow { features: [15.99, 70.07, 19.98, 40.02, 115.0, 0.0], status: -1, fs: 1.111, computed_status: -1, computed_fs: 1.130 },
    TableRow { features: [21.98, 19.96, 36.0, 45.0, 50.0, 0.0], status: -1, fs: 1.021, computed_status: -1, computed_fs: 1.018 },
    TableRow { features: [19.08, 10.05, 9.99, 25.02, 50.0, 0.4], status: -1, fs: 0.649, computed_status: -1, computed_fs: 0.699 },
    TableRow { features: [19.08, 10.05, 19.98, 30.0, 50.0, 0.4], status: -1, fs: 0.649, computed_status: -1, computed_fs: 0.754 },
    TableRow { features: [17.98, 45.02, 25.02, 25.02, 14.0, 0.3], status: 1, fs: 2.091, computed_status: 1, computed_fs: 2.009 },
    TableRow { features: [24.96, 120.0, 45.0, 53.0, 120.0, 0.0], status: 1, fs: 1.301, computed_status: 1, computed_fs: 1.273 },
    TableRow { features: [20.39, 33.46, 10.98, 16.01, 45.8, 0.2], status: -1, fs: 1.280, computed_status: -1, computed_fs: 1.289 },
    TableRow { features: [17.98, 4.95, 30.02, 19.98, 8.0, 0.3], status: 1, fs: 2.049, computed_status: 1, computed_fs: 1.931 },
    TableRow { features: [18.97, 30.01, 35.01, 34.98, 11.0, 0.2], status: 1, fs: 2.000, computed_status: 1, computed_fs: 1.726 },
    TableRow { features: [21.98, 19.96, 22.01, 19.98, 180.0, 0.0], status: -1, fs: 1.120, computed_status: -1, computed_fs: 1.006 },
    TableRow { features: [20.96, 30.01, 35.01, 40.02, 12.0, 0.4], status: 1, fs: 1.490, computed_status: 1, computed_fs: 1.492 },
    TableRow { features: [20.96, 34.96, 27.99, 40.02, 12.0, 0.5], status: 1, fs: 1.430, computed_status: 1, computed_fs: 1.487 },
    TableRow { features: [18.46, 12.00, 0.0, 30.0, 6.0, 0.0], status: -1, fs: 0.781, computed_status: -1, computed_fs: 0.996 },
    TableRow { features: [19.97, 40.06, 40.01, 40.02, 10.0, 0.2], status: 1, fs: 2.310, computed_status: 1, computed_fs: 1.935 },
    TableRow { features: [19.97, 19.96, 36.0, 45.0, 50.0, 0.3], status: -1, fs: 0.961, computed_status: -1, computed_fs: 0.963 },
    TableRow { features: [18.77, 19.96, 9.99, 25.02, 50.0, 0.3], status: -1, fs: 0.970, computed_status: -1, computed_fs: 1.011 },
    TableRow { features: [18.83, 24.76, 21.29, 29.2, 37.0, 0.5], status: -1, fs: 1.070, computed_status: -1, computed_fs: 1.200 },
    TableRow { features: [19.03, 11.70, 27.99, 34.98, 21.0, 0.1], status: -1, fs: 1.090, computed_status: -1, computed_fs: 1.199 },
    TableRow { features: [22.38, 10.05, 35.01, 30.0, 10.0, 0.0], status: 1, fs: 2.000, computed_status: -1, computed_fs: 1.564 },
    TableRow { features: [18.80, 15.31, 30.02, 25.02, 10.6, 0.4], status: 1, fs: 1.631, computed_status: 1, computed_fs: 1.747 },
];
