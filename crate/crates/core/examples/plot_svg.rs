//! Writes the first CRM counterexample as an SVG file.

use spreg::audit::{builtin_instance, BuiltinInstance};
use spreg::plot::{render_svg, Deviation, LineStyle, PlotLine};

fn main() -> spreg::Result<()> {
    let which = BuiltinInstance::CrmDisjoint;
    let (data, spec) = builtin_instance(which);
    let (agent, report) = which.manipulation();
    let lines = [
        PlotLine { hyperplane: spec.fit(&data)?, style: LineStyle::Solid, label: "truthful".into() },
        PlotLine { hyperplane: spec.fit(&data.with_report(agent, report)?)?, style: LineStyle::Dashed, label: "deviation".into() },
    ];
    let svg = render_svg(&data, &lines, Some(Deviation { x: data.x(agent)[0], truth: data.y(agent), report }))?;
    let path = std::env::temp_dir().join("crm-disjoint.svg");
    std::fs::write(&path, svg).expect("writable temp dir");
    println!("wrote {}", path.display());
    Ok(())
}
