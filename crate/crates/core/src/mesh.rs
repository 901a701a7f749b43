//! OBJ and CSV emission for sampled surface meshes.

use std::fmt::Write as _;

use crate::surface::{PieceId, SurfaceMesh};

fn piece_group_name(piece: PieceId) -> String {
    match piece {
        PieceId::Plane(k) => format!("plane_{k}"),
        PieceId::Bridge(j) => format!("bridge_{j}"),
    }
}

/// Wavefront OBJ: vertices, equilibrium tags as comments, quad faces
/// grouped per surface piece.
pub fn render_obj(mesh: &SurfaceMesh) -> String {
    let mut out = String::new();
    out.push_str("# invariant surface mesh\n");
    for (i, p) in mesh.points.iter().enumerate() {
        if mesh.equilibrium_vertices.contains(&i) {
            let _ = writeln!(out, "# equilibrium vertex {}", i + 1);
        }
        let _ = writeln!(
            out,
            "v {:.12e} {:.12e} {:.12e}",
            p.ambient[0], p.ambient[1], p.ambient[2]
        );
    }
    let mut current_group: Option<PieceId> = None;
    for q in &mesh.quads {
        let piece = mesh.points[q[0]].piece;
        if current_group != Some(piece) {
            let _ = writeln!(out, "g {}", piece_group_name(piece));
            current_group = Some(piece);
        }
        let _ = writeln!(out, "f {} {} {} {}", q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1);
    }
    out
}

/// Point cloud CSV with piece tags: piece, x, y, z.
pub fn render_point_cloud_csv(mesh: &SurfaceMesh) -> String {
    let mut out = String::from("piece,x,y,z\n");
    for p in &mesh.points {
        let _ = writeln!(
            out,
            "{},{:.12e},{:.12e},{:.12e}",
            piece_group_name(p.piece),
            p.ambient[0],
            p.ambient[1],
            p.ambient[2]
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_surface, sample_surface};

    #[test]
    fn obj_has_vertices_faces_groups_and_tags() {
        let spec = build_surface(2, 0.5).unwrap();
        let mesh = sample_surface(&spec, 4.0, 1.5).unwrap();
        let obj = render_obj(&mesh);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), mesh.points.len());
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), mesh.quads.len());
        assert_eq!(obj.matches("# equilibrium vertex").count(), 2);
        assert!(obj.contains("g plane_0"));
        assert!(obj.contains("g plane_1"));
        assert!(obj.contains("g bridge_1"));
        assert_eq!(obj, render_obj(&mesh));

        let csv = render_point_cloud_csv(&mesh);
        assert!(csv.starts_with("piece,x,y,z\n"));
        assert_eq!(csv.lines().count(), mesh.points.len() + 1);
    }
}
