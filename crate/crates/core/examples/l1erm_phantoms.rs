//! Weighted L1 regression and phantom points, which turn the d = 0 case into
//! a generalized median.

use spreg::erm::{fit_l1erm, L1Config};
use spreg::impartial::generalized_median;
use spreg::{DataSet, ExtReal};

fn main() -> spreg::Result<()> {
    let data = DataSet::from_points(&[(0.0, 0.5), (1.0, 2.2), (2.0, 1.9), (3.0, 3.1), (4.0, 12.0)])?;
    println!("lad        {}", fit_l1erm(&data, &L1Config::default())?);
    let weighted = L1Config::default().with_weights(vec![1.0, 1.0, 1.0, 1.0, 4.0]);
    println!("weighted   {}", fit_l1erm(&data, &weighted)?);

    let reports = DataSet::scalar(vec![3.0, 8.0, 9.5])?;
    let phantoms = [ExtReal::NegInf, ExtReal::Finite(4.0), ExtReal::Finite(5.0), ExtReal::PosInf];
    let fit = fit_l1erm(&reports, &L1Config::default().with_scalar_phantoms(&phantoms))?;
    println!("phantom fit {} vs generalized median {}", fit.beta0, generalized_median(reports.ys(), &phantoms)?);
    Ok(())
}
